use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// Construct outside the fragment accepted by the selected domain.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unassigned variable `{0}`")]
    Unassigned(String),
    /// Argument outside an operation's domain (non-positive value, bad index).
    #[error("{0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
