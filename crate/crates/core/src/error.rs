use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field degree m={m}: {reason}")]
    InvalidDegree { m: u32, reason: &'static str },

    #[error("element bits {bits:#x} do not belong to GF(2^{m})")]
    FieldMismatch { bits: u64, m: u32 },

    #[error("division by zero in GF(2^{m})")]
    DivisionByZero { m: u32 },

    #[error("zero polynomial: {0}")]
    ZeroPolynomial(&'static str),

    #[error("GF(2^{sub}) is not a subfield of GF(2^{big})")]
    NotSubfield { sub: u32, big: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {what} (limit {limit}); {hint}")]
    Capacity {
        what: String,
        limit: u64,
        hint: &'static str,
    },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("arity mismatch: expected {expected} elements, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("cache format error: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),

    #[error("schema mismatch: {0}")]
    Schema(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
