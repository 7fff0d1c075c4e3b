use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("presentation mismatch: {0}")]
    PresentationMismatch(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("operation undefined on the identity element")]
    Identity,

    #[error("element has finite order")]
    FiniteOrder,

    #[error("element is elliptic in this tree")]
    Elliptic,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget too small: {0}")]
    Budget(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("inconsistent markings: {0}")]
    InconsistentMarking(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
