//! Adam with bias correction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    pub config: AdamConfig,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig, params: &ModelParams) -> Self {
        let zeros: Vec<Vec<f64>> = params.blocks.iter().map(|b| vec![0.0; b.value.values().len()]).collect();
        Self {
            config,
            step: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update from the accumulated gradients. Refuses (and leaves
    /// every parameter untouched) when a gradient is not finite.
    pub fn step(&mut self, params: &mut ModelParams) -> Result<()> {
        params.check_grads()?;
        self.step += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let c1 = 1.0 - beta1.powi(self.step as i32);
        let c2 = 1.0 - beta2.powi(self.step as i32);
        for ((block, m), v) in params.blocks.iter_mut().zip(&mut self.m).zip(&mut self.v) {
            if !block.trainable {
                continue;
            }
            let grad = block.grad.values();
            let value = block.value.values_mut();
            for (((p, g), mi), vi) in value.iter_mut().zip(grad).zip(m.iter_mut()).zip(v.iter_mut()) {
                *mi = beta1 * *mi + (1.0 - beta1) * g;
                *vi = beta2 * *vi + (1.0 - beta2) * g * g;
                let mhat = *mi / c1;
                let vhat = *vi / c2;
                *p -= lr * mhat / (vhat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Kind, Tensor};

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = ModelParams::new();
        p.add("a", Tensor::from_values(&[2], Kind::Real, vec![1.0, -2.0]).unwrap());
        let mut opt = Adam::new(AdamConfig::default(), &p);
        opt.step(&mut p).unwrap();
        assert_eq!(p.flat_values(), vec![1.0, -2.0]);
    }

    #[test]
    fn non_finite_gradient_is_refused() {
        let mut p = ModelParams::new();
        p.add("a", Tensor::from_values(&[1], Kind::Real, vec![1.0]).unwrap());
        p.blocks[0].grad.values_mut()[0] = f64::NAN;
        let mut opt = Adam::new(AdamConfig::default(), &p);
        assert!(opt.step(&mut p).is_err());
        assert_eq!(p.flat_values(), vec![1.0]);
    }
}
