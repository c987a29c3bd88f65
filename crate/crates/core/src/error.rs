use thiserror::Error;

/// Errors surfaced by construction, evaluation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A measure or spec cannot be built from the given parameters.
    #[error("construction error: {0}")]
    Construction(String),

    /// A numerical routine failed to converge or detected divergence.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Malformed model or experiment configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
