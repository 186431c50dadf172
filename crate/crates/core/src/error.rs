use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not expanding: some eigenvalue has modulus <= 1")]
    NotExpanding,

    #[error("matrix is not isotropic: {0}")]
    NotIsotropic(String),

    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("G vanishes at the shifted digit 2π·{digit}; the mask is undefined")]
    MaskPoleAtDigit { digit: String },

    #[error("mask is not real: {0}")]
    NotRealMask(String),

    /// Eigenvalue 1 of the transition matrix is not a simple dominant
    /// eigenvalue, so the integer values of `φ` are not determined.
    #[error(
        "eigenvalue 1 of the transition matrix is not simple and dominant \
         (multiplicity {multiplicity}, largest other modulus {other_radius:.6})"
    )]
    NonSimpleEigenvalue { multiplicity: usize, other_radius: f64 },

    #[error("support iteration did not converge")]
    NoConvergence,

    #[error("polynomial degree {degree} exceeds the admissible {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}
