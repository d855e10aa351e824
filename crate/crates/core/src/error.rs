use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is neither 0 nor a supported prime")]
    InvalidCharacteristic(u64),
    #[error("denominator of {value} is divisible by {p}")]
    DenominatorDivisibleByPrime { value: String, p: u64 },
    #[error("field mismatch: expected characteristic {expected}, found {found}")]
    FieldMismatch { expected: u64, found: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("vector {0} is outside the support of the fan")]
    NotInSupport(String),
    #[error("vector {0} already spans a ray of the fan")]
    AlreadyARay(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("outside the supported class: {0}")]
    OutOfScope(String),
    #[error("unavailable: {0}")]
    Unavailable(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
