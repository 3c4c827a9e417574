//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("point {index} lies outside the kernel domain: {detail}")]
    DomainViolation { index: usize, detail: String },

    #[error("diagonal series argument |x| = {magnitude} is at or past the convergence radius {radius}")]
    Convergence { magnitude: f64, radius: f64 },

    #[error("degenerate base point: k(base, base) = {value} is not strictly positive")]
    DegenerateBase { value: f64 },

    #[error("operation requires a diagonal kernel, got {variant}")]
    UnsupportedVariant { variant: String },

    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    #[error("matrix is not Hermitian: |m[{row}][{col}] - conj(m[{col}][{row}])| = {asymmetry}")]
    NonHermitian {
        row: usize,
        col: usize,
        asymmetry: f64,
    },

    #[error("truncation degree {degree} too small: need at least {required}")]
    TruncationTooSmall { degree: usize, required: usize },

    #[error("degree bound {bound} is infeasible: the row equation needs degree at least {required}")]
    InfeasibleDegreeBound { bound: usize, required: usize },

    #[error("candidate is not an exact solution of the row equation; nonzero residual at entry ({row}, {col}): {residual}")]
    NotASolution {
        row: usize,
        col: usize,
        residual: String,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, CoreError>;
