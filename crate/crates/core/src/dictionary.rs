//! Global steering-vector (SV), frequency-response-vector (FRV) and planar
//! wavefront dictionaries, and channel assembly from an activation vector.
//!
//! Atom `i` pairs a spatial frequency `u_i`, a direction of departure `ũ_i`
//! and a delay `tau_i`:
//!
//! ```text
//! psi_x,i(x) = exp(-j k_r u_i^T x)
//! psi_a,i[j] = exp(+j k_r ũ_i^T (a_j - a_r))
//! psi_f,i[k] = exp(-j 2 pi (f_k - f_r) tau_i)
//! H(x) = sum_i w_i psi_x,i(x) psi_a,i psi_f,i^T
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::geometry::{AntennaArray, FrequencyGrid, Location};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        ComplexMatrix::from_fn(rows, cols, |r, c| {
            self.get(r / other.rows, c / other.cols) * other.get(r % other.rows, c % other.cols)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryBank {
    /// Spatial frequencies `u_i` (unit vectors).
    pub spatial: Vec<Location>,
    /// Directions of departure `ũ_i` (unit vectors).
    pub departures: Vec<Location>,
    /// Delays `tau_i`, seconds.
    pub delays: Vec<f64>,
    /// SV dictionary, `Na x D`.
    pub steering: ComplexMatrix,
    /// FRV dictionary, `Ns x D`.
    pub frequency: ComplexMatrix,
    pub reference_wavelength: f64,
}

/// `D` unit vectors at angles `i * 2 pi / D`.
pub fn unit_circle(count: usize) -> Vec<Location> {
    (0..count)
        .map(|i| Location::from_angle(TAU * i as f64 / count as f64))
        .collect()
}

/// SV for one direction of departure.
pub fn steering_vector(departure: Location, offsets: &[Location], wavelength: f64) -> Vec<Complex64> {
    let k = TAU / wavelength;
    offsets.iter().map(|&o| Complex64::cis(k * departure.dot(o))).collect()
}

/// FRV for one delay.
pub fn frequency_response_vector(delay: f64, frequency_offsets: &[f64]) -> Vec<Complex64> {
    frequency_offsets
        .iter()
        .map(|&df| Complex64::cis(-TAU * df * delay))
        .collect()
}

/// Planar wavefronts `exp(-j 2 pi / lambda u_i^T x)` for every spatial frequency.
pub fn planar_wavefronts(spatial: &[Location], x: Location, wavelength: f64) -> Vec<Complex64> {
    let k = TAU / wavelength;
    spatial.iter().map(|u| Complex64::cis(-k * u.dot(x))).collect()
}

impl DictionaryBank {
    /// Builds the three dictionaries with shared size `atoms`: spatial
    /// frequencies and departures at uniform unit-circle angles, delays
    /// uniformly spanning `delay_range` (endpoints included).
    pub fn build(
        array: &AntennaArray,
        grid: &FrequencyGrid,
        atoms: usize,
        delay_range: (f64, f64),
    ) -> Result<Self> {
        let (lo, hi) = delay_range;
        if atoms == 0 {
            return Err(Error::InvalidArgument("dictionary needs at least one atom".into()));
        }
        if !(lo >= 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid delay range [{lo}, {hi}]")));
        }
        if atoms > 1 && hi == lo {
            return Err(Error::InvalidArgument("empty delay range for more than one atom".into()));
        }
        let spatial = unit_circle(atoms);
        let delays = if atoms == 1 {
            vec![lo]
        } else {
            (0..atoms)
                .map(|i| lo + (hi - lo) * i as f64 / (atoms - 1) as f64)
                .collect()
        };
        Self::from_parts(array, grid, spatial.clone(), spatial, delays)
    }

    /// Bank pairing each of `angles` uniform unit-circle directions with each
    /// of `delays` uniformly spaced delays, `angles * delays` atoms in all
    /// (delay is the fast index). Spatial frequency and departure share the
    /// direction of their atom.
    pub fn build_product(
        array: &AntennaArray,
        grid: &FrequencyGrid,
        angles: usize,
        delays: usize,
        delay_range: (f64, f64),
    ) -> Result<Self> {
        if angles == 0 || delays == 0 {
            return Err(Error::InvalidArgument("product dictionary needs angles and delays".into()));
        }
        let taus = Self::build(array, grid, delays, delay_range)?.delays;
        let mut directions = Vec::with_capacity(angles * delays);
        let mut all_taus = Vec::with_capacity(angles * delays);
        for u in unit_circle(angles) {
            for &t in &taus {
                directions.push(u);
                all_taus.push(t);
            }
        }
        Self::from_parts(array, grid, directions.clone(), directions, all_taus)
    }

    /// Builds a bank from explicit atom parameters.
    pub fn from_parts(
        array: &AntennaArray,
        grid: &FrequencyGrid,
        spatial: Vec<Location>,
        departures: Vec<Location>,
        delays: Vec<f64>,
    ) -> Result<Self> {
        let d = spatial.len();
        if departures.len() != d || delays.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: departures.len().min(delays.len()),
            });
        }
        let wavelength = grid.reference_wavelength();
        let offsets = array.offsets();
        let df = grid.offsets();
        let sv: Vec<Vec<Complex64>> = departures
            .iter()
            .map(|&u| steering_vector(u, &offsets, wavelength))
            .collect();
        let frv: Vec<Vec<Complex64>> = delays.iter().map(|&t| frequency_response_vector(t, &df)).collect();
        let steering = ComplexMatrix::from_fn(offsets.len(), d, |j, i| sv[i][j]);
        let frequency = ComplexMatrix::from_fn(df.len(), d, |k, i| frv[i][k]);
        Ok(Self {
            spatial,
            departures,
            delays,
            steering,
            frequency,
            reference_wavelength: wavelength,
        })
    }

    pub fn atoms(&self) -> usize {
        self.spatial.len()
    }

    pub fn antennas(&self) -> usize {
        self.steering.rows()
    }

    pub fn frequencies(&self) -> usize {
        self.frequency.rows()
    }

    pub fn planar_wavefronts(&self, x: Location) -> Vec<Complex64> {
        planar_wavefronts(&self.spatial, x, self.reference_wavelength)
    }

    /// Rank-one atom `A_i(x) = psi_x,i(x) psi_a,i psi_f,i^T`.
    pub fn atom(&self, i: usize, x: Location) -> ChannelMatrix {
        let phase = planar_wavefronts(&self.spatial[i..=i], x, self.reference_wavelength)[0];
        let mut out = ChannelMatrix::zeros(self.antennas(), self.frequencies(), x);
        for j in 0..self.antennas() {
            let a = phase * self.steering.get(j, i);
            for k in 0..self.frequencies() {
                out.set(j, k, a * self.frequency.get(k, i));
            }
        }
        out
    }

    /// `ϖ = w ⊙ psi_x(x)`.
    pub fn activation(&self, weights: &[Complex64], x: Location) -> Result<Vec<Complex64>> {
        if weights.len() != self.atoms() {
            return Err(Error::DimensionMismatch {
                expected: self.atoms(),
                got: weights.len(),
            });
        }
        Ok(weights
            .iter()
            .zip(self.planar_wavefronts(x))
            .map(|(w, p)| w * p)
            .collect())
    }
}

/// `H = sum_i ϖ_i psi_a,i psi_f,i^T` with `ϖ = w ⊙ psi_x(x)`, as rank-one sums.
pub fn assemble_channel(weights: &[Complex64], x: Location, bank: &DictionaryBank) -> Result<ChannelMatrix> {
    let act = bank.activation(weights, x)?;
    let (na, ns) = (bank.antennas(), bank.frequencies());
    let mut h = ChannelMatrix::zeros(na, ns, x);
    for (i, &c) in act.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..na {
            let a = c * bank.steering.get(j, i);
            for k in 0..ns {
                let cur = h.get(j, k);
                h.set(j, k, cur + a * bank.frequency.get(k, i));
            }
        }
    }
    Ok(h)
}

/// Same channel through `vec(H) = (Psi_f ⊗ Psi_a) vec(diag(ϖ))`. Materialises
/// the `NaNs x D^2` Kronecker matrix, so only meant for small banks.
pub fn assemble_channel_kronecker(
    weights: &[Complex64],
    x: Location,
    bank: &DictionaryBank,
) -> Result<ChannelMatrix> {
    let act = bank.activation(weights, x)?;
    let d = bank.atoms();
    let kron = bank.frequency.kron(&bank.steering);
    let mut diag = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, &c) in act.iter().enumerate() {
        diag[i * d + i] = c;
    }
    let vec_h = kron.mul_vec(&diag)?;
    let (na, ns) = (bank.antennas(), bank.frequencies());
    let mut h = ChannelMatrix::zeros(na, ns, x);
    for k in 0..ns {
        for j in 0..na {
            h.set(j, k, vec_h[k * na + j]);
        }
    }
    Ok(h)
}

/// 2x2 rotation as row-major `[[r00, r01], [r10, r11]]`.
pub type Rotation2 = [[f64; 2]; 2];

pub fn rotation(angle: f64) -> Rotation2 {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

fn apply(r: &Rotation2, v: Location) -> Location {
    Location::new(r[0][0] * v.x + r[0][1] * v.y, r[1][0] * v.x + r[1][1] * v.y)
}

fn apply_transpose(r: &Rotation2, v: Location) -> Location {
    Location::new(r[0][0] * v.x + r[1][0] * v.y, r[0][1] * v.x + r[1][1] * v.y)
}

/// Checks `u^T (R delta) = (R^T u)^T delta` for every `delta`, to `1e-12`.
pub fn rotation_equivariance_check(u: Location, r: &Rotation2, deltas: &[Location]) -> Result<bool> {
    const TOL: f64 = 1e-12;
    let col0 = Location::new(r[0][0], r[1][0]);
    let col1 = Location::new(r[0][1], r[1][1]);
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    if (col0.norm_sq() - 1.0).abs() > 1e-9
        || (col1.norm_sq() - 1.0).abs() > 1e-9
        || col0.dot(col1).abs() > 1e-9
        || (det - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidArgument("matrix is not a proper rotation".into()));
    }
    let rotated_u = apply_transpose(r, u);
    Ok(deltas.iter().all(|&delta| {
        let lhs = u.dot(apply(r, delta));
        let rhs = rotated_u.dot(delta);
        (lhs - rhs).abs() <= TOL * (1.0 + lhs.abs())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SPEED_OF_LIGHT;

    fn bank(atoms: usize) -> DictionaryBank {
        let lambda = SPEED_OF_LIGHT / 3.5e9;
        let array = AntennaArray::ula(4, Location::ORIGIN, lambda).unwrap();
        let grid = FrequencyGrid::uniform(3.5e9, 50e6, 3).unwrap();
        DictionaryBank::build(&array, &grid, atoms, (0.0, 2e-8)).unwrap()
    }

    #[test]
    fn zero_delay_atom_is_all_ones() {
        let b = bank(8);
        assert_eq!(b.delays[0], 0.0);
        for z in b.frequency.column(0) {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn broadside_departure_is_all_ones() {
        // atoms = 4: angle pi/2 is atom 1, orthogonal to the x-axis ULA.
        let b = bank(4);
        for z in b.steering.column(1) {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn endfire_departure_alternates_by_pi() {
        let b = bank(4);
        let col = b.steering.column(0);
        for w in col.windows(2) {
            let ratio = w[1] / w[0];
            assert!((ratio.arg().abs() - std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn single_atom_at_origin() {
        let b = bank(6);
        let mut w = vec![Complex64::new(0.0, 0.0); 6];
        w[0] = Complex64::new(1.0, 0.0);
        let h = assemble_channel(&w, Location::ORIGIN, &b).unwrap();
        for j in 0..4 {
            for k in 0..3 {
                assert!((h.get(j, k) - b.steering.get(j, 0) * b.frequency.get(k, 0)).norm() < 1e-15);
            }
        }
        let zero = assemble_channel(&[Complex64::new(0.0, 0.0); 6], Location::new(1.0, 2.0), &b).unwrap();
        assert_eq!(zero.frobenius_norm(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let lambda = SPEED_OF_LIGHT / 3.5e9;
        let array = AntennaArray::ula(2, Location::ORIGIN, lambda).unwrap();
        let grid = FrequencyGrid::uniform(3.5e9, 50e6, 2).unwrap();
        assert!(DictionaryBank::build(&array, &grid, 0, (0.0, 1e-8)).is_err());
        assert!(DictionaryBank::build(&array, &grid, 4, (1e-8, 1e-8)).is_err());
        assert!(assemble_channel(&[Complex64::new(1.0, 0.0)], Location::ORIGIN, &bank(3)).is_err());
        let shear = [[1.0, 0.5], [0.0, 1.0]];
        assert!(rotation_equivariance_check(Location::new(1.0, 0.0), &shear, &[]).is_err());
    }

    #[test]
    fn quarter_turn_equivariance() {
        let r = rotation(std::f64::consts::FRAC_PI_2);
        assert!(rotation_equivariance_check(Location::new(1.0, 0.0), &r, &[Location::new(0.0, 1.0)]).unwrap());
        assert!(rotation_equivariance_check(Location::new(0.6, 0.8), &rotation(0.0), &[Location::new(3.0, -2.0)]).unwrap());
    }
}
