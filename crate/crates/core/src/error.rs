use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("unknown parameter set `{0}`")]
    UnknownParamSet(String),

    /// Codebooks or codes required by a variant were not supplied or do not fit.
    #[error("configuration error: {0}")]
    Config(String),

    /// A byte string could not be parsed as the requested object.
    #[error("malformed encoding: {0}")]
    Malformed(String),

    /// The requested computation exceeds the configured work bound.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The error-correcting decoder could not find a codeword within its radius.
    #[error("decryption failure: {0}")]
    DecodeFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
