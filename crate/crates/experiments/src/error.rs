use thiserror::Error;

/// Driver errors. [`Error::exit_code`] maps them onto the process exit status.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or command line.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A CSV handed to `summarize` does not have the expected shape.
    #[error("malformed csv: {0}")]
    Malformed(String),
    /// A run produced rows that contradict an independent check.
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error(transparent)]
    Library(#[from] wassknn::Error),
}

impl Error {
    /// `2` for usage errors, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
