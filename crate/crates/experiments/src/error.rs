use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("dataset {path} not found; create it with `{command}`")]
    MissingDataset { path: PathBuf, command: String },

    #[error("training diverged at epoch {epoch}, step {step} (non-finite {what}); parameters restored to the last good epoch")]
    Diverged { epoch: usize, step: u64, what: &'static str },

    #[error("unknown experiment '{name}' (expected one of {known})")]
    UnknownExperiment { name: String, known: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("field is not a rectangular grid: {0}")]
    NonRectangular(String),

    #[error("record {index} has a zero-norm ground truth channel")]
    ZeroNormTruth { index: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] wavefield_core::Error),

    #[error(transparent)]
    Nn(#[from] wavefield_nn::NnError),

    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
