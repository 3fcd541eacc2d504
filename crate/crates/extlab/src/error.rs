use thiserror::Error;

#[derive(Error, Debug)]
pub enum HarnessError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("sampling exhausted after {attempts} attempts: {reason}")]
    SamplingExhausted { attempts: usize, reason: String },
    #[error(transparent)]
    Core(#[from] extlab_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HarnessError {
    /// True for errors caused by the user's input rather than by a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, HarnessError::Parse { .. } | HarnessError::Validation(_) | HarnessError::UnknownSuite(_) | HarnessError::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
