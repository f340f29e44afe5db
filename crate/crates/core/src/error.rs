use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision mismatch: {0}")]
    Precision(String),
    #[error("division by a value that is zero modulo t^{0}")]
    ZeroDivisor(i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot certify: {0}")]
    Uncertified(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad input data rather than a failed
    /// precondition on well-formed data.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
