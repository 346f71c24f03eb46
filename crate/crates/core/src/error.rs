use thiserror::Error;

/// Errors raised by grid construction, parsing, planning and benchmarking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (bad coordinate,
    /// non-adjacent edge, blocked start cell, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed map text or image.
    #[error("format error: {0}")]
    Format(String),

    /// A solver or generator parameter violates its constraints.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Random map generation could not satisfy its postcondition.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn format(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
