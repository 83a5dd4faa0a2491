//! The experiment matrix: named experiments with desk and paper tiers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wavefield_nn::{ModelConfig, ModelKind};

use crate::error::{ExperimentError, Result};
use crate::setup::SetupConfig;
use crate::train::TrainConfig;

pub const BUILTIN_MANIFEST: &str = include_str!("../experiments.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub models: Vec<ModelKind>,
    pub setup: SetupConfig,
    /// Template for every model; `kind` is overridden per run.
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Training densities in locations per squared reference wavelength.
    pub densities: Vec<f64>,
    pub atoms: Vec<usize>,
    pub antennas: Vec<usize>,
    pub subcarriers: Vec<usize>,
    /// Give every density the optimiser step count of the densest run.
    pub step_matched: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            models: vec![ModelKind::MbPsiA],
            setup: SetupConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            densities: Vec::new(),
            atoms: Vec::new(),
            antennas: Vec::new(),
            subcarriers: Vec::new(),
            step_matched: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tiers {
    pub desk: ExperimentSpec,
    pub paper: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub experiments: BTreeMap<String, Tiers>,
}

impl Manifest {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let experiments = toml::from_str(text).map_err(|e| ExperimentError::Toml {
            path: origin.to_path_buf(),
            source: e,
        })?;
        Ok(Self { experiments })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_MANIFEST, Path::new("<builtin experiments.toml>")).expect("builtin manifest parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn names(&self) -> Vec<&str> {
        self.experiments.keys().map(String::as_str).collect()
    }

    pub fn spec(&self, name: &str, paper_scale: bool) -> Result<&ExperimentSpec> {
        let tiers = self.experiments.get(name).ok_or_else(|| ExperimentError::UnknownExperiment {
            name: name.into(),
            known: self.names().join(", "),
        })?;
        Ok(if paper_scale { &tiers.paper } else { &tiers.desk })
    }
}
