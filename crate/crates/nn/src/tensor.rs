//! Storage types: shaped parameter tensors and batch-major activation
//! matrices. Complex parameters are interleaved `(re, im)` pairs; complex
//! activations keep separate real and imaginary planes.

use serde::{Deserialize, Serialize};

use crate::error::{NnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Real,
    Complex,
}

impl Kind {
    /// Stored `f64` values per logical entry.
    pub fn width(self) -> usize {
        match self {
            Kind::Real => 1,
            Kind::Complex => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    kind: Kind,
    values: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize], kind: Kind) -> Self {
        let n = shape.iter().product::<usize>() * kind.width();
        Self {
            shape: shape.to_vec(),
            kind,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(shape: &[usize], kind: Kind, values: Vec<f64>) -> Result<Self> {
        let n = shape.iter().product::<usize>() * kind.width();
        if values.len() != n {
            return Err(NnError::Shape {
                context: "tensor storage",
                expected: vec![n],
                got: vec![values.len()],
            });
        }
        Ok(Self {
            shape: shape.to_vec(),
            kind,
            values,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Logical entry count (complex entries count once).
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Row-major real matrix; rows index batch samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "RMat storage");
        Self { rows, cols, data }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Row-major complex matrix with split planes.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: vec![0.0; rows * cols],
            im: vec![0.0; rows * cols],
        }
    }

    /// Complex matrix with a zero imaginary plane.
    pub fn from_real(m: &RMat) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            re: m.data.clone(),
            im: vec![0.0; m.data.len()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|v| v.is_finite())
    }

    /// `sum re*re' + im*im'`, the real inner product of the planes.
    pub fn real_dot(&self, other: &CMat) -> f64 {
        self.re.iter().zip(&other.re).map(|(a, b)| a * b).sum::<f64>()
            + self.im.iter().zip(&other.im).map(|(a, b)| a * b).sum::<f64>()
    }
}
