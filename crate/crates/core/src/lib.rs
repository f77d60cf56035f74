pub mod berkovich;
pub mod error;
pub mod field;
pub mod gauss;
pub mod numerics;
pub mod report;
pub mod series;
pub mod witness;
pub mod verify;
