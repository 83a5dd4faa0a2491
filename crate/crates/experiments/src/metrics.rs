//! NMSE, its antenna/frequency slices, and compression bookkeeping.

use serde::Serialize;
use wavefield_nn::CMat;

use crate::data::Samples;
use crate::error::{ExperimentError, Result};

/// Reported NMSE for an exact reconstruction.
pub const NMSE_FLOOR_DB: f64 = -300.0;

pub fn to_db(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        NMSE_FLOOR_DB
    } else {
        (10.0 * ratio.log10()).max(NMSE_FLOOR_DB)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmseReport {
    /// `10 log10(mean_x ||H - H_hat||^2 / ||H||^2)`.
    pub nmse_db: f64,
    /// One value per subcarrier at the central antenna.
    pub per_frequency_db: Vec<f64>,
    /// One value per antenna at the central subcarrier.
    pub per_antenna_db: Vec<f64>,
}

/// NMSE of `pred` against `truth`, optionally restricted to the subcarriers
/// where `frequencies` is true (the per-record norm is then taken over those
/// subcarriers only).
///
/// The antenna and frequency slices hold single entries per record, so they
/// are normalised by the summed truth power of the slice rather than
/// per record.
pub fn nmse(truth: &Samples, pred: &CMat, frequencies: Option<&[bool]>) -> Result<NmseReport> {
    let (na, ns) = (truth.antennas, truth.frequencies);
    if pred.rows != truth.len() || pred.cols != na * ns {
        return Err(ExperimentError::Config(format!(
            "prediction is {}x{}, truth is {}x{}",
            pred.rows,
            pred.cols,
            truth.len(),
            na * ns
        )));
    }
    if truth.is_empty() {
        return Err(ExperimentError::Config("empty test set".into()));
    }
    let keep = |n: usize| frequencies.is_none_or(|m| m[n % ns]);
    let t = &truth.targets;
    let mut total = 0.0;
    for s in 0..truth.len() {
        let (mut err, mut pow) = (0.0, 0.0);
        for n in (s * na * ns..(s + 1) * na * ns).filter(|n| keep(*n)) {
            let (dr, di) = (pred.re[n] - t.re[n], pred.im[n] - t.im[n]);
            err += dr * dr + di * di;
            pow += t.re[n] * t.re[n] + t.im[n] * t.im[n];
        }
        if pow == 0.0 {
            return Err(ExperimentError::ZeroNormTruth { index: s });
        }
        total += err / pow;
    }
    let slice = |j: usize, k: usize| {
        let (mut err, mut pow) = (0.0, 0.0);
        for s in 0..truth.len() {
            let n = (s * na + j) * ns + k;
            let (dr, di) = (pred.re[n] - t.re[n], pred.im[n] - t.im[n]);
            err += dr * dr + di * di;
            pow += t.re[n] * t.re[n] + t.im[n] * t.im[n];
        }
        if pow == 0.0 {
            f64::NAN
        } else {
            to_db(err / pow)
        }
    };
    let (jc, kc) = ((na - 1) / 2, (ns - 1) / 2);
    Ok(NmseReport {
        nmse_db: to_db(total / truth.len() as f64),
        per_frequency_db: (0..ns).map(|k| slice(jc, k)).collect(),
        per_antenna_db: (0..na).map(|j| slice(j, kc)).collect(),
    })
}

/// Compression ratio `R = 2 Na Ns N_l / N_b` kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompressionRatio {
    /// `2 Na Ns N_l`: real scalars in the stored channels.
    pub numerator: u128,
    /// `N_b`: learnable real scalars of the model.
    pub denominator: u128,
}

impl CompressionRatio {
    pub fn new(antennas: usize, frequencies: usize, locations: usize, parameters: usize) -> Self {
        Self {
            numerator: 2 * antennas as u128 * frequencies as u128 * locations as u128,
            denominator: parameters as u128,
        }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}
