use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user input: unknown labels, invalid parameters, malformed config.
    #[error("usage error: {0}")]
    Usage(String),

    /// An operation's precondition on its arguments was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported fuzziness model: {0}")]
    UnsupportedModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature failed to converge or produced a non-finite value.
    #[error("numeric failure: {message} (value {value:e}, error estimate {error_estimate:e})")]
    Numeric {
        message: String,
        value: f64,
        error_estimate: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>, value: f64, error_estimate: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            value,
            error_estimate,
        }
    }

    /// Process exit code for the CLI: 1 usage/config, 2 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric { .. } => 2,
            _ => 1,
        }
    }
}
