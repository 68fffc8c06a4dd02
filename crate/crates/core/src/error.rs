use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with dim >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace must be real and positive (got {trace:.6e})")]
    NonPositiveTrace { trace: f64 },

    #[error("state is not normalised (trace {trace:.12})")]
    NotNormalised { trace: f64 },

    #[error("time step {dt} violates the stability bound (dt*scale = {product:.3}, max {limit})")]
    Unstable { dt: f64, product: f64, limit: f64 },

    #[error("phase-space leakage {leakage:.3e} exceeds {limit:.1e}")]
    Leakage { leakage: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
