use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside the domain of the operation (empty set, value out of range).
    #[error("domain error: {0}")]
    Domain(String),

    /// An edit script does not fit the sequence it is applied to.
    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("template error: {0}")]
    Template(String),

    #[error("insufficient ratings: need at least {needed}, got {got}")]
    InsufficientRatings { needed: usize, got: usize },

    #[error("no task available: {0}")]
    NoTask(String),

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            detail: detail.into(),
        }
    }
}
