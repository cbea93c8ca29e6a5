use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("bounds must satisfy lower < upper, violated at index {index} ({lower} >= {upper})")]
    DegenerateBounds {
        index: usize,
        lower: i64,
        upper: i64,
    },

    #[error("empty model or problem")]
    Empty,

    #[error("regularization must be positive and finite, got {0}")]
    InvalidLambda(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("start point lies outside the box at index {index}")]
    OutOfBounds { index: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("route index out of range at position {position}: {value} not in [1, {max}]")]
    RouteIndex {
        position: usize,
        value: i64,
        max: i64,
    },

    #[error("problem evaluation failed: {0}")]
    Evaluation(String),
}
