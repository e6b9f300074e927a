use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("min-entropy deficit: need max weight <= 1/{required_support}, source is too concentrated")]
    EntropyDeficit { required_support: usize },

    #[error("enumeration budget exceeded: {required} evaluations needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("collision probability needs two distinct inputs")]
    InvalidPair,

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("left vertex {0} has no good neighbor")]
    NoGoodNeighbor(usize),

    #[error("index {index} out of range (only {available} candidates)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}
