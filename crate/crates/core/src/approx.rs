//! First-order distance expansion around a reference receiver location and a
//! reference emitter location, and the per-path channel approximation built
//! on it.
//!
//! For a path whose virtual antennas cluster around `a_r`, and receivers
//! around `x_r`,
//!
//! ```text
//! ||x - a|| ~ d_r + u(x_r, a)^T (x - x_r) - u_r^T (a - a_r)
//! ```
//!
//! with `u(x_r, a) = (x_r - a) / ||x_r - a||` and `u_r = u(x_r, a_r)`. The
//! leading neglected terms are `||x - x_r||^2 / (2 ||x_r - a||)` and
//! `||a - a_r||^2 / (2 d_r)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Location, SPEED_OF_LIGHT};

/// Expansion point for one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFrame {
    pub x_r: Location,
    pub a_r: Location,
    pub d_r: f64,
    pub tau_r: f64,
    /// Unit vector from `a_r` towards `x_r`.
    pub u_r: Location,
}

impl ReferenceFrame {
    pub fn new(x_r: Location, a_r: Location) -> Result<Self> {
        let diff = x_r - a_r;
        let d_r = diff.norm();
        let u_r = diff
            .normalized()
            .ok_or_else(|| Error::InvalidGeometry("reference location coincides with reference antenna".into()))?;
        Ok(Self {
            x_r,
            a_r,
            d_r,
            tau_r: d_r / SPEED_OF_LIGHT,
            u_r,
        })
    }
}

fn direction(from: Location, to: Location) -> Result<Location> {
    (to - from)
        .normalized()
        .ok_or_else(|| Error::InvalidGeometry("antenna coincides with the reference location".into()))
}

/// First-order approximation of `||x - a||`.
pub fn taylor_distance(x: Location, a: Location, frame: &ReferenceFrame) -> Result<f64> {
    let u = direction(a, frame.x_r)?;
    Ok(frame.d_r + u.dot(x - frame.x_r) - frame.u_r.dot(a - frame.a_r))
}

/// Leading second-order error term of [`taylor_distance`].
pub fn taylor_error_estimate(x: Location, a: Location, frame: &ReferenceFrame) -> Result<f64> {
    let to_antenna = frame.x_r.distance(a);
    if !(to_antenna > 0.0) || !(frame.d_r > 0.0) {
        return Err(Error::InvalidGeometry("zero reference distance".into()));
    }
    Ok(0.5 * ((x - frame.x_r).norm_sq() / to_antenna + (a - frame.a_r).norm_sq() / frame.d_r))
}

/// Approximated channel coefficient of one antenna at frequency `f_k`:
///
/// `sum_l gamma_l h_r e^{-j k_r u_r^T (x - x_r)} e^{-j 2 pi (f_k - f_r) tau_r} e^{+j k_r u_r^T (a_j - a_r)}`
///
/// with `h_r = e^{-j k_r d_r} / d_r` and `k_r = 2 pi / lambda_r`.
/// `antenna_offsets[l]` is the (virtual) antenna offset `a_{l,j} - a_{l,r}`
/// of path `l`.
pub fn approx_channel_entry(
    x: Location,
    antenna_offsets: &[Location],
    f_k: f64,
    f_r: f64,
    frames: &[ReferenceFrame],
    gammas: &[Complex64],
) -> Result<Complex64> {
    if frames.len() != gammas.len() || frames.len() != antenna_offsets.len() {
        return Err(Error::DimensionMismatch {
            expected: frames.len(),
            got: gammas.len().min(antenna_offsets.len()),
        });
    }
    let k_r = TAU * f_r / SPEED_OF_LIGHT;
    let mut total = Complex64::new(0.0, 0.0);
    for ((frame, &gamma), &offset) in frames.iter().zip(gammas).zip(antenna_offsets) {
        let reference = Complex64::cis(-k_r * frame.d_r) / frame.d_r;
        let location = Complex64::cis(-k_r * frame.u_r.dot(x - frame.x_r));
        let frequency = Complex64::cis(-TAU * (f_k - f_r) * frame.tau_r);
        let antenna = Complex64::cis(k_r * frame.u_r.dot(offset));
        total += gamma * reference * location * frequency * antenna;
    }
    Ok(total)
}
