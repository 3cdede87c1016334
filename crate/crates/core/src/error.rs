use thiserror::Error;

/// Errors raised while building or evaluating a magnetic system.
///
/// Matrix locations are stored zero-based and displayed one-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error(
        "matrix is not antisymmetric at row {}, column {}: H[j,k] + H[k,j] = {residual:e}",
        .row + 1,
        .col + 1
    )]
    NotAntisymmetric { row: usize, col: usize, residual: f64 },

    #[error(
        "matrix is not symmetric at row {}, column {}: difference {residual:e}",
        .row + 1,
        .col + 1
    )]
    NotSymmetric { row: usize, col: usize, residual: f64 },

    #[error("metric tensor is singular")]
    SingularMetric,

    #[error("tensor is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("invalid physical constant {name} = {value}")]
    InvalidConstant { name: &'static str, value: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("operators carry different hbar values ({0} vs {1})")]
    HbarMismatch(f64, f64),

    #[error("expected {expected} quantum numbers, found {found}")]
    QuantumNumberCount { expected: usize, found: usize },

    #[error("invalid integration parameter: {0}")]
    InvalidStep(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
