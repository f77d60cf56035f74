//! End-to-end witnesses: each builds its objects, runs exact checks and
//! emits a [`Report`](crate::report::Report).

pub mod spherical;
pub mod theorem;
