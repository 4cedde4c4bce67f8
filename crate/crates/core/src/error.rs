use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operator is not Hermitian (deviation {deviation:e} exceeds {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("edge list is not symmetric: {0}")]
    AsymmetricGraph(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
