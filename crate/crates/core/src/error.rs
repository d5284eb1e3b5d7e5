use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gcd undefined: both polynomials are zero")]
    GcdUndefined,
    #[error("trivial code")]
    TrivialCode,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("blocks {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("level {level} out of range {min}..={max}")]
    LevelOutOfRange { level: usize, min: usize, max: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unmatchable syndrome")]
    UnmatchableSyndrome,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
