use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("operands carry different primes ({0} and {1})")]
    MixedPrimes(u64, u64),

    #[error("operands live over different coefficient fields ({0} and {1})")]
    MixedFields(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not defined in characteristic 0")]
    CharacteristicZero(&'static str),

    #[error("{0}")]
    CharacteristicP(String),

    #[error("denominator of {0} is not a power of {1}")]
    NotPAdic(String, u64),

    #[error("indeterminate precision: {0}")]
    IndeterminatePrecision(String),

    #[error("field GF({p}^{m}) is too large (order must fit in 64 bits)")]
    FieldTooLarge { p: u64, m: u32 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid json: {0}")]
    Json(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn indeterminate(msg: impl Into<String>) -> Self {
        Error::IndeterminatePrecision(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
