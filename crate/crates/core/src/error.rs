use std::path::PathBuf;

/// Errors produced by the guidance, segmentation and I/O routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pixel ({x}, {y}) is outside the {width}x{height} grid")]
    CoordinateOutOfRange {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("object mask has no foreground pixels")]
    EmptyObject,
    #[error("degenerate scale: first positive and negative clicks coincide")]
    DegenerateScale,
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("segmenter failed: {0}")]
    Segmenter(String),
    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
