use thiserror::Error;

/// Errors shared across the toolkit. Variants map onto the CLI exit codes:
/// size caps exit 3, everything else exits 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("integer part does not fit in the requested digits: {0}")]
    OverflowDigits(String),

    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that the CLI reports as a size-cap violation (exit 3).
    pub fn is_size_cap(&self) -> bool {
        matches!(self, Error::TooLarge(_) | Error::UnsupportedSize(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
