use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    /// Problem exceeds a dense-simulation or enumeration budget.
    #[error("size limit exceeded: {what} requires {required}, limit is {limit}")]
    Size {
        what: &'static str,
        required: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("method `{method}` is not compatible with encoding `{kind}`")]
    Incompatible { method: String, kind: String },
}

impl Error {
    /// Process exit status: 1 input, 2 resource limit, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Size { .. } => 2,
            Error::Numerical(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
