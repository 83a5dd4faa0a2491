//! Mini-batch training with Adam on the squared-error loss.

use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wavefield_nn::loss::squared_error;
use wavefield_nn::{Adam, AdamConfig, ChannelModel};

use crate::data::Samples;
use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Stops after this many optimiser steps when set, whatever `epochs` says.
    pub max_steps: Option<u64>,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
    /// Subcarriers that contribute to the loss; all when `None`.
    pub frequency_mask: Option<Vec<bool>>,
    /// Where to save the last good parameters if training diverges.
    pub checkpoint_on_divergence: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 40,
            max_steps: None,
            batch_size: 64,
            adam: AdamConfig::default(),
            seed: 0,
            frequency_mask: None,
            checkpoint_on_divergence: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainOutcome {
    /// Mean batch loss of every epoch.
    pub loss_curve: Vec<f64>,
    pub steps: u64,
    pub seconds: f64,
}

/// Trains in place. On a non-finite loss or gradient the parameters are
/// restored to the start of the failing epoch (and saved if configured).
pub fn train(
    model: &mut dyn ChannelModel,
    data: &Samples,
    config: &TrainConfig,
    on_epoch: &mut dyn FnMut(usize, f64),
) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(ExperimentError::Config("empty training set".into()));
    }
    if config.batch_size == 0 {
        return Err(ExperimentError::Config("batch size must be positive".into()));
    }
    if let Some(mask) = &config.frequency_mask {
        if mask.len() != data.frequencies || !mask.iter().any(|&m| m) {
            return Err(ExperimentError::Config(format!(
                "frequency mask needs {} entries with at least one set",
                data.frequencies
            )));
        }
    }
    let mask: Option<Vec<bool>> = config
        .frequency_mask
        .as_ref()
        .map(|m| (0..data.antennas * data.frequencies).map(|n| m[n % data.frequencies]).collect());

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = Adam::new(config.adam, model.params());
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs);
    let mut steps = 0u64;
    let epochs = match config.max_steps {
        Some(s) => s.div_ceil(data.len().div_ceil(config.batch_size) as u64) as usize,
        None => config.epochs,
    };
    'epochs: for epoch in 0..epochs {
        let snapshot = model.params().clone();
        order.shuffle(&mut rng);
        let (mut sum, mut batches) = (0.0, 0usize);
        for batch in order.chunks(config.batch_size) {
            if config.max_steps.is_some_and(|m| steps >= m) {
                if batches > 0 {
                    curve.push(sum / batches as f64);
                    on_epoch(epoch, sum / batches as f64);
                }
                break 'epochs;
            }
            let (xs, targets) = data.gather(batch);
            model.params_mut().zero_grad();
            let mut failure = None;
            let loss = model.forward_backward(&xs, &mut |h| {
                squared_error(h, &targets, mask.as_deref()).unwrap_or_else(|e| {
                    failure = Some(e);
                    (f64::NAN, h.clone())
                })
            });
            if let Some(e) = failure {
                return Err(e.into());
            }
            let what = if !loss.is_finite() {
                Some("loss")
            } else if model.params().check_grads().is_err() {
                Some("gradient")
            } else {
                None
            };
            if let Some(what) = what {
                model.params_mut().assign(&snapshot)?;
                if let Some(path) = &config.checkpoint_on_divergence {
                    snapshot.save(path)?;
                }
                return Err(ExperimentError::Diverged { epoch, step: steps, what });
            }
            optimizer.step(model.params_mut())?;
            steps += 1;
            sum += loss;
            batches += 1;
        }
        curve.push(sum / batches as f64);
        on_epoch(epoch, sum / batches as f64);
    }
    Ok(TrainOutcome {
        loss_curve: curve,
        steps,
        seconds: start.elapsed().as_secs_f64(),
    })
}
