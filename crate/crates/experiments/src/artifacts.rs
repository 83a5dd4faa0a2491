//! Artifact output: CSV tables, PGM maps and JSON reports.
//!
//! An [`ArtifactSet`] writes into a hidden staging directory that replaces
//! the target directory only on [`ArtifactSet::commit`]; dropping an
//! uncommitted set deletes the staging directory, so a failed experiment
//! never leaves a partial set behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{ExperimentError, Result};

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| ExperimentError::Config(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| ExperimentError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| ExperimentError::io(&tmp, e))?;
    f.sync_all().map_err(|e| ExperimentError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| ExperimentError::io(path, e))
}

/// Binary 8-bit PGM of `values` (row-major, first row at the top), scaled
/// linearly from the minimum to the maximum.
pub fn pgm_bytes(nx: usize, ny: usize, values: &[f64]) -> Vec<u8> {
    let finite = values.iter().filter(|v| v.is_finite());
    let lo = finite.clone().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    // Image rows run top to bottom, so the largest y comes first.
    for row in (0..ny).rev() {
        for v in &values[row * nx..(row + 1) * nx] {
            let level = if v.is_finite() { ((v - lo) / span * 255.0).round() } else { 0.0 };
            out.push(level.clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn csv_bytes<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref()))?;
    }
    w.into_inner().map_err(|e| ExperimentError::io("<csv buffer>", e.into_error()))
}

pub struct ArtifactSet {
    target: PathBuf,
    staging: PathBuf,
    written: Vec<String>,
    committed: bool,
}

impl ArtifactSet {
    pub fn create(target: impl Into<PathBuf>) -> Result<Self> {
        let target = target.into();
        let parent = target.parent().map(Path::to_path_buf).unwrap_or_default();
        let name = target
            .file_name()
            .ok_or_else(|| ExperimentError::Config(format!("{} has no directory name", target.display())))?
            .to_string_lossy()
            .into_owned();
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(&parent).map_err(|e| ExperimentError::io(&parent, e))?;
        }
        let staging = parent.join(format!(".{name}.staging-{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(|e| ExperimentError::io(&staging, e))?;
        }
        fs::create_dir(&staging).map_err(|e| ExperimentError::io(&staging, e))?;
        Ok(Self {
            target,
            staging,
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.staging.join(name);
        fs::write(&path, bytes).map_err(|e| ExperimentError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn csv<S: AsRef<str>>(&mut self, name: &str, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
        self.write(name, &csv_bytes(header, rows)?)
    }

    pub fn pgm(&mut self, name: &str, nx: usize, ny: usize, values: &[f64]) -> Result<()> {
        self.write(name, &pgm_bytes(nx, ny, values))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.write(name, &text)
    }

    /// Names written so far.
    pub fn files(&self) -> &[String] {
        &self.written
    }

    /// Moves the complete set into place, replacing any previous one.
    pub fn commit(mut self) -> Result<PathBuf> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(|e| ExperimentError::io(&self.target, e))?;
        }
        fs::rename(&self.staging, &self.target).map_err(|e| ExperimentError::io(&self.target, e))?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for ArtifactSet {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.staging);
        }
    }
}
