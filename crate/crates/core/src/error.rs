use thiserror::Error;

/// Failures reported by the library.
///
/// Domain errors (`Inadmissible`, `Singular`, `InvalidArgument`, `OutOfScope`) mean
/// the inputs are outside the region where a formula applies. `Numeric` means a
/// valid input could not be resolved to the requested accuracy.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inadmissible constants: {0}")]
    Inadmissible(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn inadmissible(msg: impl Into<String>) -> Error {
    Error::Inadmissible(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
