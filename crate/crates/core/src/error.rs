use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is numerically rank deficient: smallest singular value {smallest:e} vs largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("invalid ensemble parameters: {0}")]
    InvalidParams(String),

    #[error("parameters not supported by the exact engine: {0}")]
    UnsupportedParams(String),

    #[error("scale matrix is not positive definite (failed at pivot {0})")]
    NotPositiveDefinite(usize),

    #[error("estimator needs at least 2 degrees of freedom, got {0}")]
    DegenerateDof(usize),

    #[error("matrix is not {kind} within tolerance (entry ({row}, {col}) off by {deviation:e})")]
    NotStructured {
        kind: &'static str,
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("replicate {replicate} failed after {attempts} attempts: {cause}")]
    ReplicateFailure {
        replicate: u64,
        attempts: usize,
        cause: Box<Error>,
    },

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
