use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the crate.
///
/// The enum is `Clone` so that lazily cached training results can hand out
/// their failure to every caller that asks for them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("rejected record `{id}`: {reason}")]
    RejectedRecord { id: String, reason: String },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("rating {value} outside the range of scheme {scheme}")]
    RatingOutOfRange { value: f64, scheme: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class {0} absent")]
    ClassAbsent(usize),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite value in training data")]
    NonFinite,

    #[error("degenerate model: weight vector has zero norm")]
    DegenerateModel,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error("mismatched fold plans: {0}")]
    FoldPlanMismatch(String),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
