use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed binary code: {0}")]
    MalformedCode(String),

    #[error("dense ceiling exceeded: dimension {dim} > {max}")]
    Ceiling { dim: usize, max: usize },

    #[error("Kraus enumeration cap exceeded: (M+1)^K = {count} > {cap}; use trajectory sampling or the superoperator path")]
    EnumerationCap { count: f64, cap: usize },

    #[error("channel is not trace preserving: residual {residual:e} > {tol:e}")]
    NotCptp { residual: f64, tol: f64 },

    #[error("operator is not unitary: residual {0:e}")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("construction check failed: {what} residual {residual:e}")]
    Verification { what: String, residual: f64 },

    #[error("index out of range: {index} (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
