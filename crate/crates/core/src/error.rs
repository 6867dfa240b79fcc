use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different ground sets")]
    UniverseMismatch,
    #[error("point index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("scale chain invariant violated: {0}")]
    InvalidChain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("exact search cap of {cap} points exceeded (universe has {size}); use the brick heuristic")]
    SearchCapExceeded { cap: usize, size: usize },
    #[error("unknown law id: {0}")]
    UnknownLaw(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
