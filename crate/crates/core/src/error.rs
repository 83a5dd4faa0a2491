use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("location ({x}, {y}) lies on wall {wall}")]
    LocationOnWall { x: f64, y: f64, wall: usize },

    #[error("location ({x}, {y}) coincides with a (virtual) source")]
    CoincidentSource { x: f64, y: f64 },

    #[error("location ({x}, {y}) is outside the scene bounds [-{half}, {half}]^2")]
    OutOfBounds { x: f64, y: f64, half: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scene file line {line}: {message}")]
    SceneParse { line: usize, message: String },

    #[error("bad dataset magic: expected WVFD1, found {found:?}")]
    BadMagic { found: Vec<u8> },

    #[error("truncated dataset: {0}")]
    Truncated(String),

    #[error("dataset header declares {declared} records but payload holds {actual}")]
    RecordCountMismatch { declared: u64, actual: u64 },

    #[error("zero-norm channel at record {index}")]
    ZeroNormChannel { index: usize },

    #[error("no reference solutions supplied")]
    EmptyReferences,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
