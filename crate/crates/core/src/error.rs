use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain size must be at least {min}, got {got}")]
    DomainTooSmall { min: usize, got: usize },
    #[error("domain size {0} is too large for exhaustive enumeration")]
    DomainTooLarge(usize),
    #[error("{bits} table entries is not a power of the domain size {domain}")]
    BadTableLength { bits: usize, domain: usize },
    #[error("illegal character {0:?} in predicate matrix")]
    IllegalCharacter(char),
    #[error("expected a tuple of length {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("value {value} is outside the domain of size {domain}")]
    ValueOutOfRange { value: usize, domain: usize },
    #[error("domain size mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
    #[error("variable {0:?} is not declared as primary or auxiliary")]
    DanglingVariable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("link {0:?} depends on itself or on a later link")]
    CyclicDependency(String),
    #[error("link {0:?} does not verify")]
    UnverifiableLink(String),
    #[error("search space of {needed} assignments exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
