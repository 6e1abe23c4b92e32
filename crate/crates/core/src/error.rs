use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size guard exceeded: {what} needs {needed} entries, limit is {limit}")]
    SizeGuard {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("strategy is signaling (max marginal discrepancy {violation})")]
    Signaling { violation: String },

    #[error("measurement is not projective: {0}")]
    NotProjective(String),

    #[error("second prover is not symmetric on equal question pairs (violation {0:e})")]
    NotSymmetrized(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
