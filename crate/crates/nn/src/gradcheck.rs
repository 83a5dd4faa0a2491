//! Directional finite-difference gradient checks for whole models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use wavefield_core::Location;

use crate::models::ChannelModel;
use crate::tensor::CMat;

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_DIRECTIONS: usize = 20;

#[derive(Debug, Clone)]
pub struct GradcheckReport {
    /// `(analytic, finite difference)` per direction.
    pub pairs: Vec<(f64, f64)>,
    pub max_relative_error: f64,
}

/// Compares `grad . v` with `(L(p + h v) - L(p - h v)) / 2h` along random unit
/// directions `v` of the flattened parameters. `loss` maps a prediction to
/// the scalar loss and its output cotangent.
pub fn directional_check(
    model: &mut dyn ChannelModel,
    xs: &[Location],
    loss: &dyn Fn(&CMat) -> (f64, CMat),
    directions: usize,
    step: f64,
    seed: u64,
) -> GradcheckReport {
    model.params_mut().zero_grad();
    model.forward_backward(xs, &mut |h| loss(h));
    let grad = model.params().flat_grads();
    let base = model.params().flat_values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(directions);
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let mut v: Vec<f64> = (0..base.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        let mut eval = |sign: f64| {
            let shifted: Vec<f64> = base.iter().zip(&v).map(|(p, d)| p + sign * step * d).collect();
            model.params_mut().set_flat_values(&shifted).expect("same parameter count");
            loss(&model.predict(xs)).0
        };
        let fd = (eval(1.0) - eval(-1.0)) / (2.0 * step);
        let analytic: f64 = grad.iter().zip(&v).map(|(g, d)| g * d).sum();
        let rel = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-12);
        worst = worst.max(rel);
        pairs.push((analytic, fd));
    }
    model.params_mut().set_flat_values(&base).expect("same parameter count");
    GradcheckReport {
        pairs,
        max_relative_error: worst,
    }
}
