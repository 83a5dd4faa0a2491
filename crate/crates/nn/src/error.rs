use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, NnError>;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    Shape {
        context: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("non-finite gradient in parameter block '{block}'")]
    NonFiniteGradient { block: String },

    #[error("non-finite activation in {stage}")]
    NonFiniteActivation { stage: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    #[error("checkpoint block '{name}' does not match the model ({reason})")]
    CheckpointMismatch { name: String, reason: String },

    #[error(transparent)]
    Core(#[from] wavefield_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
