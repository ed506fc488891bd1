use thiserror::Error;

/// Errors raised by the discrimination toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense dimension {dim} needs {entries} entries, above the cap of {cap}")]
    CapExceeded { dim: usize, entries: u128, cap: usize },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("wrong regime for m = {m}, n = {n}: {reason}")]
    WrongRegime { m: usize, n: usize, reason: String },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("program states are not linearly independent (Gram determinant {det:.3e})")]
    ProgramNotIndependent { det: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
