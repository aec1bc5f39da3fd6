//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("lattice side length must be at least 2, got {0}")]
    SideTooSmall(usize),
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix order must be at least 1, got {0}")]
    OrderTooSmall(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadratic form is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("frozen edge set must contain every axial edge; edge {0} is missing")]
    MissingAxialEdge(usize),
    #[error("invalid edge index {0}")]
    InvalidEdge(usize),
    #[error("unsupported oracle: {0}")]
    UnsupportedOracle(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
