//! Location-to-channel models: the model-based networks and the baselines.

mod baseline;
mod mb;

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wavefield_core::{FrequencyGrid, Location, Scene};

pub use baseline::{Baseline, BaselineKind};
pub use mb::{MbVariant, ModelBased, Sparsifier};

use crate::error::{NnError, Result};
use crate::params::ModelParams;
use crate::tensor::{CMat, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    MbPsiA,
    MbU,
    Mlp,
    RffGaussian,
    RffMbInit,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::MbPsiA,
        ModelKind::MbU,
        ModelKind::Mlp,
        ModelKind::RffGaussian,
        ModelKind::RffMbInit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MbPsiA => "mb-psi-a",
            ModelKind::MbU => "mb-u",
            ModelKind::Mlp => "mlp",
            ModelKind::RffGaussian => "rff-gaussian",
            ModelKind::RffMbInit => "rff-mb-init",
        }
    }

    pub fn is_model_based(self) -> bool {
        matches!(self, ModelKind::MbPsiA | ModelKind::MbU)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| NnError::Config(format!("unknown model '{s}' (expected one of mb-psi-a, mb-u, mlp, rff-gaussian, rff-mb-init)")))
    }
}

/// Architecture hyper-parameters shared by every model kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Dictionary size / number of Fourier features.
    pub atoms: usize,
    /// Weight-net width.
    pub t1: usize,
    /// FRV-net widths.
    pub t2: usize,
    pub t3: usize,
    /// SV-net width of the full-dictionary variant.
    pub t4: usize,
    /// DoD-net widths of the angle variant.
    pub t5: usize,
    pub t6: usize,
    /// Trunk width of the baselines.
    pub width: usize,
    /// Standard deviation of the Gaussian Fourier features, cycles per meter.
    /// `None` selects `1 / lambda_r`.
    pub sigma: Option<f64>,
    /// Initialisation scale of the last SV-net layer.
    pub sv_output_scale: f64,
    pub sparsifier: Sparsifier,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::MbPsiA,
            atoms: 256,
            t1: 256,
            t2: 64,
            t3: 64,
            t4: 256,
            t5: 64,
            t6: 64,
            width: 256,
            sigma: None,
            sv_output_scale: 0.1,
            sparsifier: Sparsifier::Ponderation,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    /// Widths published for the full-size model-based network.
    pub fn paper_scale(kind: ModelKind) -> Self {
        Self {
            kind,
            atoms: 1000,
            t4: 1024,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let widths = [self.atoms, self.t1, self.t2, self.t3, self.t4, self.t5, self.t6, self.width];
        if widths.contains(&0) {
            return Err(NnError::Config("all widths and the atom count must be positive".into()));
        }
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(NnError::Config(format!("sigma must be non-negative, got {s}")));
            }
        }
        Ok(())
    }
}

/// Array, band and scene quantities a model needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGeometry {
    /// `a_j - a_r` for every antenna.
    pub antenna_offsets: Vec<Location>,
    /// `f_k - f_r` for every subcarrier.
    pub frequency_offsets: Vec<f64>,
    pub reference_wavelength: f64,
    /// Side of the location square; inputs are normalised by `side / 2`.
    pub side: f64,
    /// Largest representable delay.
    pub max_delay: f64,
}

impl ModelGeometry {
    pub fn new(scene: &Scene, grid: &FrequencyGrid) -> Self {
        Self {
            antenna_offsets: scene.array.offsets(),
            frequency_offsets: grid.offsets(),
            reference_wavelength: grid.reference_wavelength(),
            side: scene.side,
            max_delay: scene.max_delay(),
        }
    }

    pub fn antennas(&self) -> usize {
        self.antenna_offsets.len()
    }

    pub fn frequencies(&self) -> usize {
        self.frequency_offsets.len()
    }

    /// Batch of locations scaled to `[-1, 1]^2`.
    pub fn normalized_inputs(&self, xs: &[Location]) -> RMat {
        let s = 2.0 / self.side;
        RMat::from_vec(xs.len(), 2, xs.iter().flat_map(|p| [p.x * s, p.y * s]).collect())
    }
}

/// Cotangent callback: receives the model output and returns the loss and
/// `dL/dRe + j dL/dIm` of that output.
pub type LossFn<'a> = dyn FnMut(&CMat) -> (f64, CMat) + 'a;

/// A trainable map from locations to `Na x Ns` channels. Outputs are
/// `[batch, Na * Ns]` with index `j * Ns + k`.
pub trait ChannelModel: Send {
    fn kind(&self) -> ModelKind;
    fn geometry(&self) -> &ModelGeometry;
    fn params(&self) -> &ModelParams;
    fn params_mut(&mut self) -> &mut ModelParams;
    fn predict(&self, xs: &[Location]) -> CMat;
    /// Runs the forward pass, asks `loss` for the output cotangent and
    /// accumulates parameter gradients. Returns the loss.
    fn forward_backward(&mut self, xs: &[Location], loss: &mut LossFn<'_>) -> f64;

    fn param_count(&self) -> usize {
        self.params().scalar_count()
    }
}

/// Builds any model kind with a seeded initialisation.
pub fn build_model(config: &ModelConfig, geometry: ModelGeometry) -> Result<Box<dyn ChannelModel>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(match config.kind {
        ModelKind::MbPsiA => Box::new(ModelBased::new(config, MbVariant::FullSteering, geometry, &mut rng)),
        ModelKind::MbU => Box::new(ModelBased::new(config, MbVariant::Departures, geometry, &mut rng)),
        ModelKind::Mlp => Box::new(Baseline::new(config, BaselineKind::Mlp, geometry, &mut rng)),
        ModelKind::RffGaussian => Box::new(Baseline::new(config, BaselineKind::RffGaussian, geometry, &mut rng)),
        ModelKind::RffMbInit => Box::new(Baseline::new(config, BaselineKind::RffMbInit, geometry, &mut rng)),
    })
}

/// Unit-circle spatial frequencies at angles `i * 2 pi / count`.
pub fn unit_circle_frequencies(count: usize) -> Vec<Location> {
    wavefield_core::dictionary::unit_circle(count)
}
