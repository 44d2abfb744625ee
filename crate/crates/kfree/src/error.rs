use thiserror::Error;

use crate::ring::RingId;

/// Errors shared across the whole crate.
///
/// Exit-code mapping for the CLI: `Usage`-class errors (bad flags, bad
/// domains, violated preconditions) map to 2, `Resource` to 3. A negative
/// verdict (inadmissible set, locator not found) is not an error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown ring identifier `{0}`")]
    UnknownRing(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingId, RingId),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
