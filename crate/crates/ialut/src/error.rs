use std::path::{Path, PathBuf};

use ialut_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Numerical(String),
    #[error("denoiser failed: {0}")]
    Denoiser(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn format(path: &Path, msg: impl std::fmt::Display) -> Self {
        Error::Format(format!("{}: {msg}", path.display()))
    }

    /// Process exit status: 2 input/format, 3 shape, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Format(_) | Error::Denoiser(_) => 2,
            Error::Shape(_) => 3,
            Error::Numerical(_) => 4,
            Error::Core(e) => match e {
                CoreError::ShapeMismatch(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::FrameTooSmall { .. }
                | CoreError::TooFewFrames { .. }
                | CoreError::PairIndexOutOfRange { .. } => 3,
                CoreError::NonFiniteInput
                | CoreError::NonFiniteValue(_)
                | CoreError::NonFiniteGradient { .. }
                | CoreError::Diverged { .. } => 4,
                _ => 2,
            },
        }
    }
}
