use thiserror::Error;

/// Errors raised by assembly, solves and constructors in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mesh needs at least 2 elements, got {0}")]
    MeshTooCoarse(usize),

    #[error("index {index} outside the admissible range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bubble must vanish at both element ends (B(0) = {left:e}, B(h) = {right:e})")]
    BubbleBoundary { left: f64, right: f64 },

    #[error("bubble average must be positive, got {0:e}")]
    NonPositiveAverage(f64),

    #[error("singular system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("negative radicand {0:e} in discrete seminorm")]
    NegativeRadicand(f64),

    #[error("problem size {n} exceeds the limit {max} for this solver")]
    TooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
