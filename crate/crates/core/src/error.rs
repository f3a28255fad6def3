use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("{what} did not stabilize within {limit} steps (rank sequence {ranks:?})")]
    NonStabilization {
        what: &'static str,
        limit: usize,
        ranks: Vec<usize>,
    },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIM)]
    TooLarge(usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
