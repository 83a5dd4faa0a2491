//! Batched views of datasets and model predictions.

use num_complex::Complex64;
use wavefield_core::dataset::Dataset;
use wavefield_core::{ChannelMatrix, Location};
use wavefield_nn::{CMat, ChannelModel};

/// Locations and flattened targets `[N, Na * Ns]` (index `j * Ns + k`).
#[derive(Debug, Clone)]
pub struct Samples {
    pub antennas: usize,
    pub frequencies: usize,
    pub locations: Vec<Location>,
    pub targets: CMat,
}

impl Samples {
    pub fn from_records(antennas: usize, frequencies: usize, records: &[ChannelMatrix]) -> Self {
        let cols = antennas * frequencies;
        let mut targets = CMat::zeros(records.len(), cols);
        for (s, r) in records.iter().enumerate() {
            for (n, z) in r.entries().iter().enumerate() {
                targets.re[s * cols + n] = z.re;
                targets.im[s * cols + n] = z.im;
            }
        }
        Self {
            antennas,
            frequencies,
            locations: records.iter().map(|r| r.location).collect(),
            targets,
        }
    }

    pub fn from_dataset(data: &Dataset) -> Self {
        Self::from_records(data.header.antennas as usize, data.header.frequencies as usize, &data.records)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Rows `indices` as a new batch.
    pub fn gather(&self, indices: &[usize]) -> (Vec<Location>, CMat) {
        let cols = self.targets.cols;
        let mut t = CMat::zeros(indices.len(), cols);
        for (r, &i) in indices.iter().enumerate() {
            t.re[r * cols..(r + 1) * cols].copy_from_slice(&self.targets.re[i * cols..(i + 1) * cols]);
            t.im[r * cols..(r + 1) * cols].copy_from_slice(&self.targets.im[i * cols..(i + 1) * cols]);
        }
        (indices.iter().map(|&i| self.locations[i]).collect(), t)
    }

    pub fn entry(&self, row: usize, j: usize, k: usize) -> Complex64 {
        let n = row * self.targets.cols + j * self.frequencies + k;
        Complex64::new(self.targets.re[n], self.targets.im[n])
    }
}

/// Model output over many locations, evaluated in chunks.
pub fn predict(model: &dyn ChannelModel, locations: &[Location], chunk: usize) -> CMat {
    let cols = model.geometry().antennas() * model.geometry().frequencies();
    let mut out = CMat::zeros(locations.len(), cols);
    for (c, xs) in locations.chunks(chunk.max(1)).enumerate() {
        let h = model.predict(xs);
        let start = c * chunk.max(1) * cols;
        out.re[start..start + h.re.len()].copy_from_slice(&h.re);
        out.im[start..start + h.im.len()].copy_from_slice(&h.im);
    }
    out
}
