use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix data is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("entry magnitude {magnitude:e} exceeds the scale guard {limit:e}")]
    ScaleGuard { magnitude: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("iteration did not converge (best residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("eigenvalues receiving different weights are not separated (gap {gap:e})")]
    DegenerateEigenvalue { gap: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not normal (commutator norm {commutator:e})")]
    NotNormal { commutator: f64 },

    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("{nonzero} nonzero weights exceed the dimension {n}")]
    WeightCountExceedsDimension { nonzero: usize, n: usize },

    #[error("c-polynomial degree {degree} exceeds the combinatorial guard {limit}")]
    DegreeTooLarge { degree: u128, limit: u128 },

    #[error("weight vector entry {index} is not finite")]
    NonFiniteWeight { index: usize },

    #[error("grid size {grid} is invalid: {reason}")]
    InvalidGrid { grid: usize, reason: &'static str },

    #[error("support gap does not change sign on the bracket (closest angle {nearest}, gap {gap:e})")]
    NoSignChange { nearest: f64, gap: f64 },

    #[error("degenerate point configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("region is degenerate ({0}); a two-dimensional region is required")]
    DegenerateRegion(&'static str),

    #[error("weights must be sorted in descending order")]
    WeightsNotSorted,

    #[error("{0}")]
    Parse(String),
}
