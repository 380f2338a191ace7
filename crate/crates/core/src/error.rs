use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime; q must be an odd prime power")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("field or enumeration size {size} exceeds the configured cap {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element value {value} is out of range for a field of order {q}")]
    ElementOutOfRange { value: u64, q: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("invalid conic parameters: {0}")]
    InvalidConic(String),
    #[error("intersection counts need nonzero quadrances, got i={i}, j={j}, k={k}")]
    ZeroQuadranceArg { i: u32, j: u32, k: u32 },
    #[error("class index {0} is not valid for this index set")]
    IndexInvalid(String),
    #[error("distributions or kernels live on different index sets")]
    IndexMismatch,
    #[error("kernel is not ergodic: {0}")]
    NotErgodic(String),
    #[error("no result within {0} steps")]
    Timeout(u64),
    #[error("q = {q} does not belong to the {branch} branch")]
    BranchMismatch { q: u32, branch: &'static str },
    #[error("worst-case TV curve increased at t = {t}: {prev} -> {next}")]
    NonMonotone { t: usize, prev: f64, next: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
