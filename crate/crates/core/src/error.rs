use thiserror::Error;

/// Errors raised across the approximation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation request: {0}")]
    InvalidTruncation(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("evaluation point {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    #[error("target function is not finite at sample {index} (value {value})")]
    NonFiniteTarget { index: usize, value: f64 },

    #[error("column {0} of the sensing matrix is identically zero")]
    ZeroColumn(usize),

    #[error("system must be column-normalized before this operation")]
    NotNormalized,

    #[error("least-squares system is rank deficient ({rank} < {cols})")]
    RankDeficient { rank: usize, cols: usize },

    #[error("relative error undefined for a zero reference vector")]
    ZeroReference,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Trial {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
