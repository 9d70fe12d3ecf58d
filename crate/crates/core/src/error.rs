use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not match data length {len}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix has an empty dimension ({rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal ratio {off_diagonal:e})")]
    SvdNoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("matrix is numerically rank deficient (sigma_min/sigma_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("triangular factor has a zero diagonal entry")]
    ZeroDiagonal,

    #[error("l1 program infeasible: minimum attainable residual {min_residual:e} exceeds radius {radius:e}")]
    Infeasible { min_residual: f64, radius: f64 },

    #[error("l1 solver did not converge after {iterations} steps: {reason}")]
    SolverNoConvergence { iterations: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
