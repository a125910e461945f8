use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The inputs are well-formed but violate the operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The request exceeds a hard size cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Resource(_) => "resource",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
