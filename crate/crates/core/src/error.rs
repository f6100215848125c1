use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain of an operation (non-finite values,
    /// unnormalized analyzers, wrong field stage, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource limit would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    /// Parameters that are well-formed but describe a degenerate run.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
