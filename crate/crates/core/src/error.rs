use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("net budget exceeded: dim {dim}, eps {eps} gives cardinality bound {bound:.3e}")]
    NetBudgetExceeded { dim: usize, eps: f64, bound: f64 },

    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("column {index} has norm {norm} but must be normalized to {expected}")]
    ColumnNotNormalized {
        index: usize,
        norm: f64,
        expected: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
