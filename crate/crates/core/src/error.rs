use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical routines and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// An experiment or table was configured with inconsistent parameters.
    #[error("config error: {0}")]
    Config(String),
    /// A geometric precondition failed (e.g. a point outside a body).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative method failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Precondition(_) => "precondition",
            Error::Numeric(_) => "numeric",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
