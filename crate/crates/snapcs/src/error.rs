use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] snapcs_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("byte {offset}: {msg}")]
    Format { offset: u64, msg: String },
    #[error("{path}: byte {offset}: {msg}")]
    FileFormat { path: PathBuf, offset: u64, msg: String },
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Attaches a path to a format error.
    pub fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            Error::Format { offset, msg } => Error::FileFormat { path: path.to_path_buf(), offset, msg },
            other => other,
        }
    }

    /// Whether the failure is a caller mistake rather than bad data or IO.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Core(snapcs_core::Error::Usage(_)))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
