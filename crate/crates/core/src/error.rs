use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("polynomial {0:?} (LSB-first, implicit leading 1) is reducible")]
    Reducible(Vec<u32>),
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("field too large: p^m must stay below 2^{max_bits} (needs {bits} bits)")]
    FieldTooLarge { bits: u32, max_bits: u32 },
    #[error("element or matrix does not belong to this field: {0}")]
    FieldMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("enumeration budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("bad register: {0}")]
    BadRegister(String),
    #[error("cube states of distinct codewords are not orthogonal: {0}")]
    OrthogonalityViolated(String),
    #[error("state too large: {amplitudes} amplitudes exceeds limit {limit}")]
    ScaleExceeded { amplitudes: u128, limit: u128 },
    #[error("promise violated: {0}")]
    PromiseViolated(String),
    #[error("label matrix stayed singular for {0} rounds")]
    RetryBudgetExhausted(usize),
    #[error("no sigma in p^0..p^(m-1) produced a verified candidate")]
    NoSigmaSucceeded,
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("assertion failed: {0}")]
    AssertionFailed(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
