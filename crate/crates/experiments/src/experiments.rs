//! Experiment protocols. Each writes its artifacts through an
//! [`ArtifactSet`] and returns a summary of the headline numbers.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use wavefield_nn::{build_model, ChannelModel, ModelConfig, ModelKind};

use crate::artifacts::ArtifactSet;
use crate::data::{predict, Samples};
use crate::error::{ExperimentError, Result};
use crate::manifest::ExperimentSpec;
use crate::metrics::{nmse, CompressionRatio, NmseReport};
use crate::setup::{Bench, SetupConfig};
use crate::spectrum::spatial_spectrum;
use crate::train::{train, TrainConfig, TrainOutcome};

pub const EXPERIMENTS: [&str; 7] = [
    "reconstruction",
    "density",
    "frequency",
    "compression",
    "antennas",
    "subcarriers",
    "mb-comparison",
];

/// A trained model with its evaluation.
pub struct Fitted {
    pub model: Box<dyn ChannelModel>,
    pub outcome: TrainOutcome,
    pub report: NmseReport,
    /// Test-set prediction, row-aligned with the bench's test samples.
    pub prediction: wavefield_nn::CMat,
}

pub fn fit(bench: &Bench, model: &ModelConfig, train_config: &TrainConfig) -> Result<Fitted> {
    fit_on(bench, &bench.train, model, train_config)
}

pub fn fit_on(bench: &Bench, data: &Samples, model: &ModelConfig, train_config: &TrainConfig) -> Result<Fitted> {
    let mut net = build_model(model, bench.geometry())?;
    let kind = model.kind;
    let outcome = train(net.as_mut(), data, train_config, &mut |epoch, loss| {
        log::info!("{kind} epoch {} loss {loss:.6}", epoch + 1)
    })?;
    let prediction = predict(net.as_ref(), &bench.test.locations, 512);
    let report = nmse(&bench.test, &prediction, None)?;
    log::info!("{kind}: test NMSE {:.2} dB", report.nmse_db);
    Ok(Fitted {
        model: net,
        outcome,
        report,
        prediction,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub model: ModelKind,
    pub parameters: usize,
    pub nmse_db: f64,
    pub train_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub paper_scale: bool,
    pub runs: Vec<RunSummary>,
    pub files: Vec<String>,
    pub seconds: f64,
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn model_config(spec: &ExperimentSpec, kind: ModelKind) -> ModelConfig {
    ModelConfig {
        kind,
        seed: spec.setup.seed,
        ..spec.model.clone()
    }
}

fn loss_rows(outcome: &TrainOutcome) -> Vec<Vec<String>> {
    outcome
        .loss_curve
        .iter()
        .enumerate()
        .map(|(e, l)| vec![(e + 1).to_string(), fmt(*l)])
        .collect()
}

pub fn run_experiment(name: &str, spec: &ExperimentSpec, paper_scale: bool, out: &Path) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let mut set = ArtifactSet::create(out.join(name))?;
    let runs = match name {
        "reconstruction" => reconstruction(spec, &mut set)?,
        "density" => density(spec, &mut set)?,
        "frequency" => frequency(spec, &mut set)?,
        "compression" => compression(spec, &mut set)?,
        "antennas" => antennas(spec, &mut set)?,
        "subcarriers" => subcarriers(spec, &mut set)?,
        "mb-comparison" => mb_comparison(spec, &mut set)?,
        other => {
            return Err(ExperimentError::UnknownExperiment {
                name: other.into(),
                known: EXPERIMENTS.join(", "),
            })
        }
    };
    let mut summary = ExperimentSummary {
        name: name.into(),
        paper_scale,
        runs,
        files: set.files().to_vec(),
        seconds: start.elapsed().as_secs_f64(),
    };
    summary.files.push("report.json".into());
    set.json(
        "report.json",
        &serde_json::json!({ "summary": &summary, "spec": spec }),
    )?;
    set.commit()?;
    Ok(summary)
}

fn summary(label: String, fitted: &Fitted) -> RunSummary {
    RunSummary {
        label,
        model: fitted.model.kind(),
        parameters: fitted.model.param_count(),
        nmse_db: fitted.report.nmse_db,
        train_seconds: fitted.outcome.seconds,
    }
}

/// Reconstruction maps, spectra and NMSE of every model on one scene.
fn reconstruction(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    let bench = Bench::build(&spec.setup)?;
    let (jc, kc) = (bench.scene.array.central_index(), bench.grid.central_index());
    let grid = &bench.test_grid;
    let radius = 1.0 / (2.0 * bench.grid.reference_wavelength());

    let truth = grid.field(|r| bench.test.entry(r, jc, kc))?;
    set.pgm("truth_real.pgm", grid.n, grid.n, &truth.real_part())?;
    let truth_spec = spatial_spectrum(&truth);
    set.pgm("truth_spectrum.pgm", grid.n, grid.n, &truth_spec.log_magnitude())?;
    let mut spectrum_rows = vec![vec!["truth".to_string(), fmt(truth_spec.low_frequency_ratio(radius))]];

    let mut rows = Vec::new();
    let mut slices = Vec::new();
    let mut runs = Vec::new();
    for &kind in &spec.models {
        let fitted = fit(&bench, &model_config(spec, kind), &spec.train)?;
        let cols = fitted.prediction.cols;
        let p = &fitted.prediction;
        let field = grid.field(|r| {
            let n = r * cols + jc * bench.grid.len() + kc;
            num_complex::Complex64::new(p.re[n], p.im[n])
        })?;
        let s = spatial_spectrum(&field);
        set.pgm(&format!("{kind}_real.pgm"), grid.n, grid.n, &field.real_part())?;
        set.pgm(&format!("{kind}_spectrum.pgm"), grid.n, grid.n, &s.log_magnitude())?;
        spectrum_rows.push(vec![kind.to_string(), fmt(s.low_frequency_ratio(radius))]);
        set.csv(&format!("{kind}_loss.csv"), &["epoch", "loss"], &loss_rows(&fitted.outcome))?;
        let ratio = CompressionRatio::new(bench.train.antennas, bench.train.frequencies, bench.train.len(), fitted.model.param_count());
        rows.push(vec![
            kind.to_string(),
            fitted.model.param_count().to_string(),
            fmt(fitted.report.nmse_db),
            fmt(ratio.value()),
        ]);
        for (j, v) in fitted.report.per_antenna_db.iter().enumerate() {
            slices.push(vec![kind.to_string(), "antenna".into(), j.to_string(), fmt(*v)]);
        }
        for (k, v) in fitted.report.per_frequency_db.iter().enumerate() {
            slices.push(vec![kind.to_string(), "frequency".into(), k.to_string(), fmt(*v)]);
        }
        runs.push(summary(kind.to_string(), &fitted));
    }
    set.csv("metrics.csv", &["model", "parameters", "nmse_db", "compression_ratio"], &rows)?;
    set.csv("slices.csv", &["model", "axis", "index", "nmse_db"], &slices)?;
    set.csv("spectrum.csv", &["field", "low_frequency_ratio"], &spectrum_rows)?;
    Ok(runs)
}

/// NMSE against training density, optionally at a fixed optimiser step budget.
fn density(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    if spec.densities.is_empty() {
        return Err(ExperimentError::Config("density sweep needs `densities`".into()));
    }
    let lambda = spec.setup.wavelength();
    let densest = spec.densities.iter().cloned().fold(0.0, f64::max);
    let max_steps = if spec.step_matched {
        let side = spec.setup.load_scene()?.side;
        let n = wavefield_core::dataset::train_count(side, densest / (lambda * lambda));
        Some((spec.train.epochs * n.div_ceil(spec.train.batch_size)) as u64)
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &d in &spec.densities {
        let setup = SetupConfig {
            density: d / (lambda * lambda),
            ..spec.setup.clone()
        };
        let bench = Bench::build(&setup)?;
        let train_config = TrainConfig {
            max_steps,
            ..spec.train.clone()
        };
        for &kind in &spec.models {
            let fitted = fit(&bench, &model_config(spec, kind), &train_config)?;
            rows.push(vec![
                kind.to_string(),
                fmt(d),
                fmt(setup.density),
                bench.train.len().to_string(),
                fitted.outcome.steps.to_string(),
                fmt(fitted.report.nmse_db),
            ]);
            runs.push(summary(format!("{kind}@{d}"), &fitted));
        }
    }
    set.csv(
        "density.csv",
        &["model", "per_wavelength_sq", "per_m2", "train_locations", "steps", "nmse_db"],
        &rows,
    )?;
    Ok(runs)
}

/// Lower half of the subcarriers seen in training; NMSE per subcarrier.
pub fn lower_half_mask(subcarriers: usize) -> Vec<bool> {
    (0..subcarriers).map(|k| k < subcarriers.div_ceil(2)).collect()
}

fn frequency(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    let bench = Bench::build(&spec.setup)?;
    let seen = lower_half_mask(bench.grid.len());
    let unseen: Vec<bool> = seen.iter().map(|s| !s).collect();
    let train_config = TrainConfig {
        frequency_mask: Some(seen.clone()),
        ..spec.train.clone()
    };
    let mut rows = Vec::new();
    let mut per = Vec::new();
    let mut runs = Vec::new();
    for &kind in &spec.models {
        let fitted = fit(&bench, &model_config(spec, kind), &train_config)?;
        let s = nmse(&bench.test, &fitted.prediction, Some(&seen))?.nmse_db;
        let u = nmse(&bench.test, &fitted.prediction, Some(&unseen))?.nmse_db;
        rows.push(vec![kind.to_string(), fmt(s), fmt(u), fmt(fitted.report.nmse_db)]);
        for (k, (&f, is_seen)) in bench.grid.frequencies().iter().zip(&seen).enumerate() {
            let only: Vec<bool> = (0..bench.grid.len()).map(|i| i == k).collect();
            let v = nmse(&bench.test, &fitted.prediction, Some(&only))?.nmse_db;
            per.push(vec![
                kind.to_string(),
                k.to_string(),
                fmt(f),
                is_seen.to_string(),
                fmt(v),
            ]);
        }
        runs.push(summary(kind.to_string(), &fitted));
    }
    set.csv("frequency.csv", &["model", "seen_nmse_db", "unseen_nmse_db", "all_nmse_db"], &rows)?;
    set.csv("per_frequency.csv", &["model", "index", "frequency_hz", "seen", "nmse_db"], &per)?;
    Ok(runs)
}

fn compression(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    if spec.atoms.is_empty() {
        return Err(ExperimentError::Config("compression sweep needs `atoms`".into()));
    }
    let bench = Bench::build(&spec.setup)?;
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &d in &spec.atoms {
        for &kind in &spec.models {
            let config = ModelConfig {
                atoms: d,
                ..model_config(spec, kind)
            };
            let fitted = fit(&bench, &config, &spec.train)?;
            let n_b = fitted.model.param_count();
            let ratio = CompressionRatio::new(bench.train.antennas, bench.train.frequencies, bench.train.len(), n_b);
            let bytes = fitted.model.params().to_bytes();
            set.write(&format!("{kind}_d{d}.wvfp"), &bytes)?;
            rows.push(vec![
                kind.to_string(),
                d.to_string(),
                n_b.to_string(),
                ratio.numerator.to_string(),
                ratio.denominator.to_string(),
                fmt(ratio.value()),
                bytes.len().to_string(),
                fmt(fitted.report.nmse_db),
            ]);
            runs.push(summary(format!("{kind}@D={d}"), &fitted));
        }
    }
    set.csv(
        "compression.csv",
        &["model", "atoms", "parameters", "ratio_numerator", "ratio_denominator", "ratio", "checkpoint_bytes", "nmse_db"],
        &rows,
    )?;
    Ok(runs)
}

fn sweep_setups<'a>(
    spec: &'a ExperimentSpec,
    values: &'a [usize],
    apply: impl Fn(&mut SetupConfig, usize) + 'a,
) -> impl Iterator<Item = (usize, SetupConfig)> + 'a {
    values.iter().map(move |&v| {
        let mut s = spec.setup.clone();
        apply(&mut s, v);
        (v, s)
    })
}

/// Per-antenna NMSE slices (central subcarrier) for each array size.
fn antennas(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let values = if spec.antennas.is_empty() { vec![spec.setup.antennas] } else { spec.antennas.clone() };
    for (na, setup) in sweep_setups(spec, &values, |s, v| s.antennas = v) {
        let bench = Bench::build(&setup)?;
        for &kind in &spec.models {
            let fitted = fit(&bench, &model_config(spec, kind), &spec.train)?;
            for (j, v) in fitted.report.per_antenna_db.iter().enumerate() {
                rows.push(vec![kind.to_string(), na.to_string(), j.to_string(), fmt(*v)]);
            }
            runs.push(summary(format!("{kind}@Na={na}"), &fitted));
        }
    }
    set.csv("per_antenna.csv", &["model", "antennas", "antenna", "nmse_db"], &rows)?;
    Ok(runs)
}

/// NMSE and per-subcarrier slices (central antenna) for each band size.
fn subcarriers(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    let mut rows = Vec::new();
    let mut per = Vec::new();
    let mut runs = Vec::new();
    let values = if spec.subcarriers.is_empty() { vec![spec.setup.subcarriers] } else { spec.subcarriers.clone() };
    for (ns, setup) in sweep_setups(spec, &values, |s, v| s.subcarriers = v) {
        let bench = Bench::build(&setup)?;
        for &kind in &spec.models {
            let fitted = fit(&bench, &model_config(spec, kind), &spec.train)?;
            rows.push(vec![kind.to_string(), ns.to_string(), fmt(fitted.report.nmse_db)]);
            for (k, v) in fitted.report.per_frequency_db.iter().enumerate() {
                per.push(vec![kind.to_string(), ns.to_string(), k.to_string(), fmt(*v)]);
            }
            runs.push(summary(format!("{kind}@Ns={ns}"), &fitted));
        }
    }
    set.csv("subcarriers.csv", &["model", "subcarriers", "nmse_db"], &rows)?;
    set.csv("per_frequency.csv", &["model", "subcarriers", "index", "nmse_db"], &per)?;
    Ok(runs)
}

/// Full-steering against departure-angle SV nets as the array grows.
fn mb_comparison(spec: &ExperimentSpec, set: &mut ArtifactSet) -> Result<Vec<RunSummary>> {
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let values = if spec.antennas.is_empty() { vec![spec.setup.antennas] } else { spec.antennas.clone() };
    for (na, setup) in sweep_setups(spec, &values, |s, v| s.antennas = v) {
        let bench = Bench::build(&setup)?;
        for &kind in &spec.models {
            let fitted = fit(&bench, &model_config(spec, kind), &spec.train)?;
            rows.push(vec![
                kind.to_string(),
                na.to_string(),
                fitted.model.param_count().to_string(),
                fmt(fitted.report.nmse_db),
            ]);
            runs.push(summary(format!("{kind}@Na={na}"), &fitted));
        }
    }
    set.csv("mb_comparison.csv", &["model", "antennas", "parameters", "nmse_db"], &rows)?;
    Ok(runs)
}
