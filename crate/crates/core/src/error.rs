use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the mathematical input was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource bound would be exceeded.
    #[error("resource limit exceeded: {what} = {requested} exceeds the bound {limit}")]
    Resource {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Two operators were combined over incompatible bases.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal algebraic invariant failed to hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
