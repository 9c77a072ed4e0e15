use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: String },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid margin selection: {0}")]
    InvalidMargin(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid delta vector: {0}")]
    InvalidDelta(String),

    #[error("shuffle structure failed validation: {0}")]
    InvalidShuffle(String),

    #[error("invalid grid step {step}: {reason}")]
    InvalidStep { step: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
