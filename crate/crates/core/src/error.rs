use thiserror::Error;

/// Errors raised by the library. Numerical edge cases that have a natural
/// value (an infinite mean, a censored hitting time) are returned as values,
/// not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bracketing interval found for the minimizer: {0}")]
    NoBracket(String),

    #[error("all {0} samples were censored at the horizon")]
    AllCensored(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
