use thiserror::Error;

/// Errors raised across the library.
///
/// Each variant maps onto a process exit code through [`Error::exit_code`]:
/// size limits and internal failures are `1`, anything caused by the caller is `2`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("zero success probability for syndrome {0}")]
    ZeroProbability(usize),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeLimit(_) | Error::Internal(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
