//! Scene, band and dataset construction shared by the CLI and experiments.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wavefield_core::dataset::{build_test_grid, channel_or_reject, generate_train_set, grid_axis_count};
use wavefield_core::{ChannelMatrix, FrequencyGrid, Location, Scene};
use wavefield_nn::ModelGeometry;

use crate::data::Samples;
use crate::error::Result;
use crate::spectrum::GridField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SetupConfig {
    /// Scene preset name (`los-empty`, `street`, `street-nlos`) or path to a scene file.
    pub scene: String,
    /// Array size for presets; scene files carry their own array.
    pub antennas: usize,
    pub subcarriers: usize,
    pub reference_frequency: f64,
    pub bandwidth: f64,
    /// Training locations per square meter.
    pub density: f64,
    /// Test grid spacing in reference wavelengths.
    pub test_spacing: f64,
    pub seed: u64,
}

impl Default for SetupConfig {
    fn default() -> Self {
        Self {
            scene: "street".into(),
            antennas: 8,
            subcarriers: 8,
            reference_frequency: 3.5e9,
            bandwidth: 50e6,
            density: 175.0,
            test_spacing: 0.25,
            seed: 0,
        }
    }
}

impl SetupConfig {
    pub fn load_scene(&self) -> Result<Scene> {
        let path = Path::new(&self.scene);
        if path.is_file() {
            return Ok(Scene::load(path)?);
        }
        Ok(Scene::preset(&self.scene, self.antennas, self.reference_frequency)?)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::uniform(self.reference_frequency, self.bandwidth, self.subcarriers)?)
    }

    pub fn wavelength(&self) -> f64 {
        wavefield_core::SPEED_OF_LIGHT / self.reference_frequency
    }

    /// Density in locations per squared reference wavelength.
    pub fn density_per_wavelength_sq(&self) -> f64 {
        self.density * self.wavelength().powi(2)
    }
}

/// The square test grid with every point kept (rejected points hold `None`).
#[derive(Debug, Clone)]
pub struct TestGrid {
    pub n: usize,
    pub spacing: f64,
    pub locations: Vec<Location>,
    /// Row of [`Bench::test`] for each grid point, `None` where no channel exists.
    pub rows: Vec<Option<usize>>,
}

impl TestGrid {
    /// Scatters per-record values onto the grid, zero where rejected.
    pub fn field(&self, values: impl Fn(usize) -> Complex64) -> Result<GridField> {
        let v = self.rows.iter().map(|r| r.map_or(Complex64::new(0.0, 0.0), &values)).collect();
        GridField::new(self.n, self.n, self.spacing, v)
    }
}

pub struct Bench {
    pub config: SetupConfig,
    pub scene: Scene,
    pub grid: FrequencyGrid,
    pub train: Samples,
    pub test: Samples,
    pub test_grid: TestGrid,
}

impl Bench {
    pub fn build(config: &SetupConfig) -> Result<Self> {
        let scene = config.load_scene()?;
        let grid = config.frequency_grid()?;
        let train = generate_train_set(&scene, &grid, config.density, config.seed)?;
        let train = Samples::from_dataset(&train);
        let (test, test_grid) = test_set(&scene, &grid, config.test_spacing * config.wavelength())?;
        Ok(Self {
            config: config.clone(),
            scene,
            grid,
            train,
            test,
            test_grid,
        })
    }

    pub fn geometry(&self) -> ModelGeometry {
        ModelGeometry::new(&self.scene, &self.grid)
    }
}

pub fn test_set(scene: &Scene, grid: &FrequencyGrid, spacing: f64) -> Result<(Samples, TestGrid)> {
    let locations = build_test_grid(scene.side, spacing)?;
    let mut records: Vec<ChannelMatrix> = Vec::new();
    let mut rows = Vec::with_capacity(locations.len());
    for x in &locations {
        match channel_or_reject(scene, *x, grid)? {
            Some(h) => {
                rows.push(Some(records.len()));
                records.push(h);
            }
            None => rows.push(None),
        }
    }
    let samples = Samples::from_records(scene.array.len(), grid.len(), &records);
    let n = grid_axis_count(scene.side, spacing);
    Ok((samples, TestGrid { n, spacing, locations, rows }))
}
