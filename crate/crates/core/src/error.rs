use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are coarse on purpose: callers (the CLI, the Monte Carlo
/// layer) branch on the *kind* of failure, not on its text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller passed arguments that violate a precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// A size cap was exceeded; the computation would be too large.
    #[error("resource limit: {what} is {actual}, cap is {cap}")]
    Resource {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    /// The input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two independent routes to the same quantity disagreed.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Malformed text input.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for [`Error::Resource`]; the Monte Carlo layer counts these
    /// separately instead of aborting.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}
