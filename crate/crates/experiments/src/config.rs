//! Run configuration file for the CLI.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wavefield_nn::ModelConfig;

use crate::error::{ExperimentError, Result};
use crate::setup::SetupConfig;
use crate::train::TrainConfig;

/// TOML file with optional `[setup]`, `[model]` and `[train]` tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub setup: SetupConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        toml::from_str(&text).map_err(|e| ExperimentError::Toml {
            path: path.to_path_buf(),
            source: e,
        })
    }

    /// Applies one seed to data generation, initialisation and shuffling.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.setup.seed = seed;
        self.model.seed = seed;
        self.train.seed = seed;
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serialises")
    }
}
