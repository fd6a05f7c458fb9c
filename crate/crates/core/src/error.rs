use thiserror::Error;

/// Errors raised by the numerical core and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |A - A^H| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("vector {index} is linearly dependent on its predecessors (smallest Gram eigenvalue {min_eigenvalue:e})")]
    LinearlyDependent { index: usize, min_eigenvalue: f64 },

    #[error("state vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("observable {index} has norm {norm} exceeding bound {bound}")]
    BoundExceeded { index: usize, norm: f64, bound: f64 },

    #[error("empty operator tuple")]
    EmptyTuple,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid with {points} points exceeds the cap of {cap}; use a larger eta")]
    GridTooLarge { points: u64, cap: u64 },

    #[error("Hausdorff distance is undefined for an empty set")]
    EmptySet,

    #[error("target lies outside the convex hull (distance {distance:e})")]
    OutsideHull { distance: f64 },

    #[error("need at least one certificate")]
    NoCertificates,

    #[error("cut {cut} is out of range for dimension {dim}")]
    CutOutOfRange { cut: usize, dim: usize },

    #[error("unknown model family '{0}' (expected one of: shift, commuting-diag, perturbed-commuting, clock, custom)")]
    UnknownFamily(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
