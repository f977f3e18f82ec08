use std::path::PathBuf;

/// Errors surfaced by index construction, queries and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("position {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),

    #[error("unsupported alphabet: {0}")]
    UnsupportedAlphabet(String),

    #[error("index format: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
