use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter record violates one of its defining inequalities.
    #[error("invalid parameters: {0}")]
    Validation(String),

    /// A numerical procedure did not reach the requested tolerance.
    #[error("accuracy error: {message} (best estimate {estimate:e}, error {error:e})")]
    Accuracy {
        message: String,
        estimate: f64,
        error: f64,
    },

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("integration error: {0}")]
    Integration(String),

    /// The operation has no symbolic form for this representation.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
