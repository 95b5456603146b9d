use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is rank deficient: rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("set is not full-dimensional: {0}")]
    NotFullDimensional(String),
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),
    #[error("set is unbounded: {0}")]
    Unbounded(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}
