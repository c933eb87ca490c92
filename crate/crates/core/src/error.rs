use thiserror::Error;

/// Errors raised by instance construction, oracles and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid input: {0}")]
    Input(String),
    /// An exhaustive procedure would exceed its enumeration budget.
    #[error("instance too large: {0}")]
    Size(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
