use thiserror::Error;

/// Errors raised by sampling, array construction and coverage analysis.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size computation (`p^d`, `n^t`, ...) does not fit in a machine integer.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The requested orthogonal array family is not constructible here.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    /// Input data fails a structural check (strength, shape, symbol range).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Too few data points to fit a gradient.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// `base^exp` with overflow reported as a capacity error.
pub(crate) fn checked_pow(base: usize, exp: usize, what: &str) -> Result<usize> {
    let exp = u32::try_from(exp).map_err(|_| Error::Capacity(format!("{what}: exponent {exp}")))?;
    base.checked_pow(exp)
        .ok_or_else(|| Error::Capacity(format!("{what}: {base}^{exp} overflows")))
}
