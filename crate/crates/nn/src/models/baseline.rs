//! Black-box baselines: a complex MLP on normalised coordinates and complex
//! MLPs on random Fourier features.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use wavefield_core::Location;

use super::{unit_circle_frequencies, ChannelModel, LossFn, ModelConfig, ModelGeometry, ModelKind};
use crate::layers::{ComplexMlp, ComplexTrace};
use crate::params::ModelParams;
use crate::tensor::{CMat, Kind, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Mlp,
    /// Feature frequencies drawn from `N(0, sigma^2)` per coordinate.
    RffGaussian,
    /// Feature frequencies `u_i / lambda_r` on the dictionary's unit circle.
    RffMbInit,
}

/// Feature frequencies (cycles per meter) live in a frozen parameter block
/// so checkpoints carry them.
pub struct Baseline {
    kind: BaselineKind,
    geometry: ModelGeometry,
    params: ModelParams,
    net: ComplexMlp,
}

impl Baseline {
    pub fn new(config: &ModelConfig, kind: BaselineKind, geometry: ModelGeometry, rng: &mut impl Rng) -> Self {
        let outputs = geometry.antennas() * geometry.frequencies();
        let features = match kind {
            BaselineKind::Mlp => Vec::new(),
            BaselineKind::RffGaussian => {
                let sigma = config.sigma.unwrap_or(1.0 / geometry.reference_wavelength);
                let normal = Normal::new(0.0, sigma).expect("sigma validated as finite and non-negative");
                (0..config.atoms)
                    .map(|_| Location::new(normal.sample(rng), normal.sample(rng)))
                    .collect()
            }
            BaselineKind::RffMbInit => unit_circle_frequencies(config.atoms)
                .into_iter()
                .map(|u| u * (1.0 / geometry.reference_wavelength))
                .collect(),
        };
        let inputs = if kind == BaselineKind::Mlp { 2 } else { config.atoms };
        let mut params = ModelParams::new();
        if !features.is_empty() {
            let flat = features.iter().flat_map(|b| [b.x, b.y]).collect();
            let t = Tensor::from_values(&[features.len(), 2], Kind::Real, flat).expect("two coordinates per feature");
            params.add_frozen("rff.frequencies", t);
        }
        let net = ComplexMlp::new(&mut params, "trunk", &[inputs, config.width, config.width, outputs], 1.0, rng);
        Self {
            kind,
            geometry,
            params,
            net,
        }
    }

    pub fn baseline_kind(&self) -> BaselineKind {
        self.kind
    }

    /// Fourier feature frequencies; empty for the plain MLP.
    pub fn features(&self) -> Vec<Location> {
        if self.kind == BaselineKind::Mlp {
            return Vec::new();
        }
        self.params.blocks[0]
            .value
            .values()
            .chunks_exact(2)
            .map(|b| Location::new(b[0], b[1]))
            .collect()
    }

    /// Network input for a batch: normalised coordinates or `exp(-j 2 pi b . x)`.
    pub fn embed(&self, xs: &[Location]) -> CMat {
        if self.kind == BaselineKind::Mlp {
            return CMat::from_real(&self.geometry.normalized_inputs(xs));
        }
        let freqs = self.params.blocks[0].value.values();
        let d = freqs.len() / 2;
        let mut e = CMat::zeros(xs.len(), d);
        for (s, x) in xs.iter().enumerate() {
            for (i, b) in freqs.chunks_exact(2).enumerate() {
                let (sin, cos) = (-TAU * (b[0] * x.x + b[1] * x.y)).sin_cos();
                e.re[s * d + i] = cos;
                e.im[s * d + i] = sin;
            }
        }
        e
    }

    fn forward(&self, xs: &[Location]) -> ComplexTrace {
        self.net.forward(&self.params, &self.embed(xs))
    }
}

impl ChannelModel for Baseline {
    fn kind(&self) -> ModelKind {
        match self.kind {
            BaselineKind::Mlp => ModelKind::Mlp,
            BaselineKind::RffGaussian => ModelKind::RffGaussian,
            BaselineKind::RffMbInit => ModelKind::RffMbInit,
        }
    }

    fn geometry(&self) -> &ModelGeometry {
        &self.geometry
    }

    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ModelParams {
        &mut self.params
    }

    fn predict(&self, xs: &[Location]) -> CMat {
        self.forward(xs).output
    }

    fn forward_backward(&mut self, xs: &[Location], loss: &mut LossFn<'_>) -> f64 {
        let trace = self.forward(xs);
        let (value, g) = loss(&trace.output);
        self.net.backward(&mut self.params, &trace, g, false);
        value
    }
}
