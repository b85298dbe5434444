use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "singular element: constant coefficient {magnitude:e} is below threshold {threshold:e}"
    )]
    Singular { magnitude: f64, threshold: f64 },

    #[error("size out of range: {0}")]
    Size(String),

    #[error("unsupported local dimension {0} (qubits only)")]
    UnsupportedDimension(usize),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state file: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
