//! Planar locations, antenna arrays and frequency grids.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A point (or displacement) in the 2D propagation plane, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

impl Location {
    pub const ORIGIN: Location = Location { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Location) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Location) -> f64 {
        (self - other).norm()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Location> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Unit vector at angle `theta` (radians) from the x axis.
    pub fn from_angle(theta: f64) -> Location {
        Location::new(theta.cos(), theta.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Location {
    type Output = Location;
    fn add(self, rhs: Location) -> Location {
        Location::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Location {
    type Output = Location;
    fn sub(self, rhs: Location) -> Location {
        Location::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Location {
    type Output = Location;
    fn mul(self, rhs: f64) -> Location {
        Location::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Location {
    type Output = Location;
    fn neg(self) -> Location {
        Location::new(-self.x, -self.y)
    }
}

/// Emitting antenna array.
///
/// The reference position is always the barycenter of the element positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    elements: Vec<Location>,
    reference: Location,
    reference_wavelength: f64,
}

impl AntennaArray {
    pub fn new(elements: Vec<Location>, reference_wavelength: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGeometry("antenna array needs at least one element".into()));
        }
        if !(reference_wavelength > 0.0 && reference_wavelength.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "reference wavelength must be positive, got {reference_wavelength}"
            )));
        }
        if elements.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite antenna position".into()));
        }
        let n = elements.len() as f64;
        let sum = elements.iter().fold(Location::ORIGIN, |acc, &e| acc + e);
        let reference = sum * (1.0 / n);
        Ok(Self {
            elements,
            reference,
            reference_wavelength,
        })
    }

    /// Uniform linear array of `count` elements along the x axis, centred on
    /// `center`, with half reference wavelength spacing.
    pub fn ula(count: usize, center: Location, reference_wavelength: f64) -> Result<Self> {
        let spacing = reference_wavelength / 2.0;
        let mid = (count as f64 - 1.0) / 2.0;
        let elements = (0..count)
            .map(|j| Location::new(center.x + (j as f64 - mid) * spacing, center.y))
            .collect();
        Self::new(elements, reference_wavelength)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Location] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> Location {
        self.elements[j]
    }

    pub fn reference(&self) -> Location {
        self.reference
    }

    pub fn reference_wavelength(&self) -> f64 {
        self.reference_wavelength
    }

    /// Element offsets from the reference position, `a_j - a_r`.
    pub fn offsets(&self) -> Vec<Location> {
        self.elements.iter().map(|&e| e - self.reference).collect()
    }

    /// Index of the element closest to the reference position.
    pub fn central_index(&self) -> usize {
        (self.len() - 1) / 2
    }
}

/// Uniformly spaced subcarrier frequencies around a reference frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    reference: f64,
    bandwidth: f64,
    frequencies: Vec<f64>,
}

impl FrequencyGrid {
    /// `count` frequencies spanning `[reference - bandwidth/2, reference + bandwidth/2]`.
    /// A single-frequency grid holds only the reference frequency.
    pub fn uniform(reference: f64, bandwidth: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("frequency grid needs at least one frequency".into()));
        }
        if !(reference > 0.0) || !(bandwidth >= 0.0) || bandwidth >= 2.0 * reference {
            return Err(Error::InvalidArgument(format!(
                "invalid frequency grid: reference {reference} Hz, bandwidth {bandwidth} Hz"
            )));
        }
        let frequencies = if count == 1 {
            vec![reference]
        } else {
            let step = bandwidth / (count - 1) as f64;
            let start = reference - bandwidth / 2.0;
            (0..count).map(|k| start + k as f64 * step).collect()
        };
        Ok(Self {
            reference,
            bandwidth,
            frequencies,
        })
    }

    /// Grid keeping only the listed frequency indices (reference unchanged).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty frequency subset".into()));
        }
        let mut frequencies = Vec::with_capacity(indices.len());
        for &k in indices {
            let f = *self.frequencies.get(k).ok_or_else(|| {
                Error::InvalidArgument(format!("frequency index {k} out of range"))
            })?;
            frequencies.push(f);
        }
        Ok(Self {
            reference: self.reference,
            bandwidth: self.bandwidth,
            frequencies,
        })
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn reference_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.reference
    }

    pub fn wavelength(&self, k: usize) -> f64 {
        SPEED_OF_LIGHT / self.frequencies[k]
    }

    /// Offsets `f_k - f_r`.
    pub fn offsets(&self) -> Vec<f64> {
        self.frequencies.iter().map(|f| f - self.reference).collect()
    }

    pub fn central_index(&self) -> usize {
        (self.len() - 1) / 2
    }
}
