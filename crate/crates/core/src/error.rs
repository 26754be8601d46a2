use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::Verification`] to exit
/// code 3 and everything else that stems from bad input to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on numeric input was violated (zero modulus, even
    /// "prime", non-coprime moduli, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration or request (composite q1, count out of bounds,
    /// mixed cohort sizes, ...).
    #[error("invalid request: {0}")]
    Invalid(String),

    /// A computed value failed independent re-verification.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
