use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} entries cannot form a square of side {dim}")]
    NotSquare { dim: usize, rows: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian: max |A - A^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {residual:e})")]
    EigenNotConverged { sweeps: usize, residual: f64 },

    #[error("integration step underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("tolerance {0:e} outside the supported range [1e-13, 1e-6]")]
    InvalidTolerance(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNotConverged { a: f64, b: f64 },

    #[error("no sign change of the indicator in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("domain error in {what}: value {value}")]
    Domain { what: &'static str, value: f64 },
}
