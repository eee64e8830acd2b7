use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("malformed body file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cannot read body file: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid body: {0}")]
    Invalid(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("origin not interior to the body")]
    OriginNotInterior,

    #[error("dimension mismatch: body is {expected}-dimensional, got {got} coordinates")]
    DimensionMismatch { expected: usize, got: usize },
}

impl BodyError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BodyError::Invalid(msg.into())
    }

    /// True for errors caused by unparseable input rather than bad parameters.
    pub fn is_malformed(&self) -> bool {
        matches!(self, BodyError::Json(_))
    }
}
