use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),
    #[error("sampling: {0}")]
    Sample(String),
    #[error("operator: {0}")]
    Op(String),
    #[error("norm: {0}")]
    Norm(String),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
