use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("vectors do not span the ambient space (lower frame bound {0:e})")]
    NotAFrame(f64),
    #[error("the scalability map needs dimension n >= 2, got {0}")]
    InvalidDimension(usize),
    #[error("frame must be two-dimensional, got n = {0}")]
    WrongDimension(usize),
    #[error("weight {index} is negative ({value:e})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("F(phi_{0}) is zero, inverse-norm coefficient undefined")]
    ZeroFColumn(usize),
    #[error("simplex pivot limit of {0} exceeded")]
    PivotLimitExceeded(usize),
    #[error("linear program is unbounded")]
    UnboundedProblem,
    #[error("vertex enumeration too large: {0}")]
    TooLarge(String),
    #[error("frame is not scalable")]
    NotScalable,
    #[error("inconclusive after {iterations} iterations (residual {residual:e})")]
    Inconclusive { iterations: usize, residual: f64 },
    #[error("solver reported a scaling that is not tight (condition number {cond})")]
    ValidationFailed { cond: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
