//! 2D spatial spectrum of a complex field sampled on a square grid.
//!
//! Frequencies are signed so that a field `exp(-j 2 pi f . x)` peaks at `f`
//! (cycles per meter); the map is fftshifted with the zero frequency at
//! index `n / 2` of each axis.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ExperimentError, Result};

/// Row-major field, `y` the slow index.
#[derive(Debug, Clone)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn new(nx: usize, ny: usize, spacing: f64, values: Vec<Complex64>) -> Result<Self> {
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(ExperimentError::NonRectangular(format!(
                "{} values for a {nx} x {ny} grid",
                values.len()
            )));
        }
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(ExperimentError::NonRectangular(format!("grid spacing {spacing}")));
        }
        Ok(Self { nx, ny, spacing, values })
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub nx: usize,
    pub ny: usize,
    /// Bin widths in cycles per meter.
    pub dfx: f64,
    pub dfy: f64,
    /// Squared DFT magnitudes, fftshifted.
    pub power: Vec<f64>,
}

impl Spectrum {
    pub fn frequency(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            (ix as f64 - (self.nx / 2) as f64) * self.dfx,
            (iy as f64 - (self.ny / 2) as f64) * self.dfy,
        )
    }

    /// `10 log10` of the power, floored 120 dB below the peak.
    pub fn log_magnitude(&self) -> Vec<f64> {
        let peak = self.power.iter().cloned().fold(0.0, f64::max);
        let floor = peak * 1e-12;
        self.power.iter().map(|p| 10.0 * p.max(floor).max(f64::MIN_POSITIVE).log10()).collect()
    }

    /// Index `(ix, iy)` of the strongest bin.
    pub fn peak(&self) -> (usize, usize) {
        let i = (0..self.power.len())
            .max_by(|&a, &b| self.power[a].total_cmp(&self.power[b]))
            .unwrap_or(0);
        (i % self.nx, i / self.nx)
    }

    /// Energy within `radius` (cycles per meter) of the origin over total energy.
    pub fn low_frequency_ratio(&self, radius: f64) -> f64 {
        let mut inside = 0.0;
        let mut total = 0.0;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let p = self.power[iy * self.nx + ix];
                let (fx, fy) = self.frequency(ix, iy);
                total += p;
                if fx.hypot(fy) <= radius {
                    inside += p;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            inside / total
        }
    }
}

pub fn spatial_spectrum(field: &GridField) -> Spectrum {
    let (nx, ny) = (field.nx, field.ny);
    let mut planner = FftPlanner::<f64>::new();
    // exp(-j 2 pi f x) peaks at +f under the positive-exponent transform.
    let fft_x = planner.plan_fft_inverse(nx);
    let fft_y = planner.plan_fft_inverse(ny);
    let mut data = field.values.clone();
    for row in data.chunks_exact_mut(nx) {
        fft_x.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            column[iy] = data[iy * nx + ix];
        }
        fft_y.process(&mut column);
        for iy in 0..ny {
            data[iy * nx + ix] = column[iy];
        }
    }
    let mut power = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let sx = (ix + nx / 2) % nx;
            let sy = (iy + ny / 2) % ny;
            power[sy * nx + sx] = data[iy * nx + ix].norm_sqr();
        }
    }
    Spectrum {
        nx,
        ny,
        dfx: 1.0 / (nx as f64 * field.spacing),
        dfy: 1.0 / (ny as f64 * field.spacing),
        power,
    }
}
