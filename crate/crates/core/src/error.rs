use thiserror::Error;

use crate::space::MatFn;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {coeffs} coefficients for {functions} functions")]
    LengthMismatch { coeffs: usize, functions: usize },

    #[error("operator is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not self-adjoint (max deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("operator is singular (smallest singular value {smallest:e})")]
    Singular { smallest: f64 },

    #[error("iteration did not converge after {iterations} steps (last step {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Carries a basis pair `(f, g)` for which `<Uf, g> != <f, U*g>`.
    #[error("operator is not adjointable with respect to the matrix-valued inner product")]
    NotAdjointable { witness: Box<(MatFn, MatFn)> },

    #[error("unsupported shape: s = {s} does not divide r = {r}")]
    UnsupportedShape { s: usize, r: usize },

    #[error("operator norm {norm} is not below 1")]
    NormCondition { norm: f64 },

    #[error("operator has zero norm")]
    ZeroNorm,

    #[error("operators do not commute (commutator norm {commutator:e})")]
    NonCommuting { commutator: f64 },

    #[error("family is empty")]
    EmptyFamily,

    #[error("dual basis has not been computed")]
    MissingDual,

    #[error("dense decomposition failed: {0}")]
    Decomposition(String),

    #[error("invalid serialized data: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
