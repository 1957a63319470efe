use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The posterior carries no first-harmonic information, so no phase
    /// estimate exists.
    #[error("posterior has b_-1 = 0; phase estimate undefined")]
    NoInformation,

    #[error("observed outcome has zero probability under the posterior (b~_0 = {0:e})")]
    ImpossibleOutcome(f64),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QpeError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        QpeError::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        QpeError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = QpeError> = std::result::Result<T, E>;
