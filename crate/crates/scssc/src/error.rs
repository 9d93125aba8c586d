use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] scssc_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn format(path: &Path, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    /// Process exit status: 1 for numerical failures, 2 for I/O and configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(e) if !is_config(e) => 1,
            _ => 2,
        }
    }
}

fn is_config(e: &scssc_core::Error) -> bool {
    use scssc_core::Error as E;
    match e {
        E::Stage {
            stage: "config", ..
        } => true,
        E::Stage { source, .. } | E::Pixel { source, .. } => is_config(source),
        E::InvalidParameter(_) | E::Dimension(_) | E::TooLarge { .. } | E::NothingToEvaluate => {
            true
        }
        _ => false,
    }
}
