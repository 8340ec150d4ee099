use thiserror::Error;

/// Errors raised by the geometric and arithmetic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation (zero divisor,
    /// wrong sign class, violated trace condition, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates the documented contract of a constructor.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Floating-point input too close to a degenerate configuration.
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    /// Not enough data to produce the requested statistic.
    #[error("insufficient data: {0}")]
    Insufficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
