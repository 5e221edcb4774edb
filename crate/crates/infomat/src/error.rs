use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient samples: need at least {needed}, got {got} ({detail})")]
    InsufficientSamples {
        needed: usize,
        got: usize,
        detail: String,
    },

    #[error("matrix is not positive definite: nonpositive pivot at index {pivot}")]
    NotPositiveDefinite { pivot: usize },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
