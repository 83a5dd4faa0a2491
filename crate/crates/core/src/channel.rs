//! Antenna/frequency channel matrices and channel impulse responses.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{FrequencyGrid, Location, SPEED_OF_LIGHT};
use crate::paths::{enumerate_paths, PathSet};
use crate::scene::Scene;

/// `Na x Ns` complex channel at one location, row-major (`entries[j * ns + k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    na: usize,
    ns: usize,
    entries: Vec<Complex64>,
    pub location: Location,
}

impl ChannelMatrix {
    pub fn zeros(na: usize, ns: usize, location: Location) -> Self {
        Self {
            na,
            ns,
            entries: vec![Complex64::new(0.0, 0.0); na * ns],
            location,
        }
    }

    pub fn from_entries(na: usize, ns: usize, entries: Vec<Complex64>, location: Location) -> Result<Self> {
        if entries.len() != na * ns {
            return Err(Error::DimensionMismatch {
                expected: na * ns,
                got: entries.len(),
            });
        }
        Ok(Self {
            na,
            ns,
            entries,
            location,
        })
    }

    pub fn antennas(&self) -> usize {
        self.na
    }

    pub fn frequencies(&self) -> usize {
        self.ns
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.ns + k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: Complex64) {
        self.entries[j * self.ns + k] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.entries[j * self.ns..(j + 1) * self.ns]
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// `||self - other||_F^2`.
    pub fn distance_sq(&self, other: &ChannelMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    /// Column-major vectorisation `vec(H)`, index `k * na + j`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.entries.len());
        for k in 0..self.ns {
            for j in 0..self.na {
                v.push(self.get(j, k));
            }
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// One tap of a channel impulse response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Propagation delay `d / c - nu`, seconds.
    pub delay: f64,
    /// `gamma / d`.
    pub amplitude: Complex64,
}

fn path_distance(x: Location, source: Location) -> Result<f64> {
    let d = x.distance(source);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::CoincidentSource { x: x.x, y: x.y })
    }
}

/// Evaluates the virtual-source channel model at `x`:
/// `h_{j,k} = sum_l gamma_l / d_{l,j} * exp(-j 2 pi f_k (d_{l,j} / c - nu_l))`.
pub fn channel_response(paths: &PathSet, x: Location, grid: &FrequencyGrid) -> Result<ChannelMatrix> {
    let na = paths.antenna_count();
    let ns = grid.len();
    let mut h = ChannelMatrix::zeros(na, ns, x);
    for j in 0..na {
        for path in paths.antenna(j) {
            let d = path_distance(x, path.virtual_source)?;
            let amplitude = path.gamma / d;
            let delay = d / SPEED_OF_LIGHT - path.nu;
            for (k, &f) in grid.frequencies().iter().enumerate() {
                let idx = j * ns + k;
                h.entries[idx] += amplitude * Complex64::cis(-TAU * f * delay);
            }
        }
    }
    Ok(h)
}

/// Channel impulse response of antenna `j` as a delay-sorted Dirac train.
pub fn impulse_response(paths: &PathSet, x: Location, j: usize) -> Result<Vec<Tap>> {
    if j >= paths.antenna_count() {
        return Err(Error::InvalidArgument(format!(
            "antenna index {j} out of range for {} antennas",
            paths.antenna_count()
        )));
    }
    let mut taps = paths
        .antenna(j)
        .iter()
        .map(|path| {
            let d = path_distance(x, path.virtual_source)?;
            Ok(Tap {
                delay: d / SPEED_OF_LIGHT - path.nu,
                amplitude: path.gamma / d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    taps.sort_by(|a, b| a.delay.total_cmp(&b.delay));
    Ok(taps)
}

/// Fourier transform of a Dirac train at the given frequencies.
pub fn taps_to_frequency(taps: &[Tap], frequencies: &[f64]) -> Vec<Complex64> {
    frequencies
        .iter()
        .map(|&f| {
            taps.iter()
                .map(|t| t.amplitude * Complex64::cis(-TAU * f * t.delay))
                .sum()
        })
        .collect()
}

impl Scene {
    /// Ground-truth channel at `x`.
    pub fn channel_at(&self, x: Location, grid: &FrequencyGrid) -> Result<ChannelMatrix> {
        let paths = enumerate_paths(self, x)?;
        channel_response(&paths, x, grid)
    }
}
