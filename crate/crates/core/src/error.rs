use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The sketch can embed at most `d` vectors; asking for more is a contract violation.
    #[error("sketch capacity exceeded: {requested} columns requested, sketch dimension is {capacity}")]
    SketchCapacity { requested: usize, capacity: usize },

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("breakdown at column {index}")]
    Breakdown { index: usize },

    #[error("zero start vector")]
    ZeroStartVector,

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    IterationLimit { sweeps: usize },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
