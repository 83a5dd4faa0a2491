//! `wavefield` command-line interface.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use wavefield_core::dataset::{generate_test_set, generate_train_set, Dataset};
use wavefield_core::dictionary::DictionaryBank;
use wavefield_core::omp::{omp_decompose, two_stage_estimate};
use wavefield_experiments::artifacts::{atomic_write, csv_bytes, ArtifactSet};
use wavefield_experiments::config::RunConfig;
use wavefield_experiments::data::{predict, Samples};
use wavefield_experiments::experiments::{run_experiment, EXPERIMENTS};
use wavefield_experiments::manifest::Manifest;
use wavefield_experiments::metrics::{nmse, to_db, CompressionRatio};
use wavefield_experiments::setup::test_set;
use wavefield_experiments::spectrum::spatial_spectrum;
use wavefield_experiments::train::train;
use wavefield_experiments::ExperimentError;
use wavefield_nn::{build_model, ChannelModel};

#[derive(Parser)]
#[command(name = "wavefield", version, about = "Location-to-channel synthesis, sparse recovery and model-based learning")]
struct Cli {
    /// TOML run configuration with [setup], [model] and [train] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for data generation, initialisation and shuffling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "wavefield-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the training set and the test grid dataset.
    Gen,
    /// Train the configured model on `<data>/train.wvfd`.
    Train {
        /// Directory holding the datasets (defaults to --out).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on `<data>/test.wvfd`.
    Eval {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Checkpoint (defaults to `<out>/model.wvfp`).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Sparse decomposition at training locations and two-stage estimates on the test set.
    Omp {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        sparsity: usize,
        #[arg(long, default_value_t = 64)]
        angles: usize,
        #[arg(long, default_value_t = 32)]
        delays: usize,
        /// Number of training locations used as references.
        #[arg(long, default_value_t = 200)]
        references: usize,
        /// Evaluate every n-th test record.
        #[arg(long, default_value_t = 50)]
        stride: usize,
    },
    /// Spatial spectrum of the ground truth and, with a checkpoint, of a model.
    Spectrum {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run a named experiment from the manifest (or `all`).
    Experiment {
        name: String,
        #[arg(long)]
        paper_scale: bool,
        /// Manifest file (defaults to the built-in experiment matrix).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    match &cli.command {
        Command::Gen => gen(&config, &cli.out),
        Command::Train { data } => train_cmd(&config, data.as_deref().unwrap_or(&cli.out), &cli.out, &cli),
        Command::Eval { data, checkpoint } => {
            eval(&config, data.as_deref().unwrap_or(&cli.out), checkpoint.clone(), &cli)
        }
        Command::Omp {
            data,
            sparsity,
            angles,
            delays,
            references,
            stride,
        } => omp(
            &config,
            data.as_deref().unwrap_or(&cli.out),
            &cli,
            *sparsity,
            *angles,
            *delays,
            *references,
            *stride,
        ),
        Command::Spectrum { checkpoint } => spectrum(&config, checkpoint.clone(), &cli),
        Command::Experiment {
            name,
            paper_scale,
            manifest,
        } => experiment(name, *paper_scale, manifest.clone(), cli.seed, &cli.out),
    }
}

fn gen_command(cli: &Cli, dir: &Path) -> String {
    let mut s = String::from("wavefield gen");
    if let Some(c) = &cli.config {
        s += &format!(" --config {}", c.display());
    }
    if let Some(seed) = cli.seed {
        s += &format!(" --seed {seed}");
    }
    s + &format!(" --out {}", dir.display())
}

fn load_dataset(cli: &Cli, dir: &Path, name: &str, config: &RunConfig) -> Result<Dataset> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(ExperimentError::MissingDataset {
            path,
            command: gen_command(cli, dir),
        }
        .into());
    }
    let data = Dataset::read(&path)?;
    let (na, ns) = (data.header.antennas as usize, data.header.frequencies as usize);
    let scene = config.setup.load_scene()?;
    if na != scene.array.len() || ns != config.setup.subcarriers {
        bail!(
            "{} holds {na}x{ns} channels but the configuration describes {}x{}",
            path.display(),
            scene.array.len(),
            config.setup.subcarriers
        );
    }
    Ok(data)
}

fn gen(config: &RunConfig, out: &Path) -> Result<()> {
    let scene = config.setup.load_scene()?;
    let grid = config.setup.frequency_grid()?;
    let train = generate_train_set(&scene, &grid, config.setup.density, config.setup.seed)?;
    train.write(out.join("train.wvfd"))?;
    let test = generate_test_set(&scene, &grid, config.setup.test_spacing * config.setup.wavelength())?;
    test.write(out.join("test.wvfd"))?;
    atomic_write(&out.join("scene.txt"), scene.to_text().as_bytes())?;
    atomic_write(&out.join("config.toml"), config.to_toml().as_bytes())?;
    println!("train: {} records, test: {} records", train.len(), test.len());
    Ok(())
}

fn build(config: &RunConfig) -> Result<Box<dyn ChannelModel>> {
    let scene = config.setup.load_scene()?;
    let grid = config.setup.frequency_grid()?;
    Ok(build_model(&config.model, wavefield_nn::ModelGeometry::new(&scene, &grid))?)
}

fn train_cmd(config: &RunConfig, data: &Path, out: &Path, cli: &Cli) -> Result<()> {
    let dataset = load_dataset(cli, data, "train.wvfd", config)?;
    let samples = Samples::from_dataset(&dataset);
    let mut model = build(config)?;
    let mut train_config = config.train.clone();
    train_config.checkpoint_on_divergence.get_or_insert_with(|| out.join("last-good.wvfp"));
    let outcome = train(model.as_mut(), &samples, &train_config, &mut |epoch, loss| {
        log::info!("epoch {} loss {loss:.6}", epoch + 1)
    })?;
    model.params().save(out.join("model.wvfp"))?;
    let rows: Vec<Vec<String>> = outcome
        .loss_curve
        .iter()
        .enumerate()
        .map(|(e, l)| vec![(e + 1).to_string(), format!("{l}")])
        .collect();
    atomic_write(&out.join("loss.csv"), &csv_bytes(&["epoch", "loss"], &rows)?)?;
    atomic_write(&out.join("config.toml"), config.to_toml().as_bytes())?;
    println!(
        "{}: {} parameters, {} steps in {:.1}s, final loss {:.6}",
        config.model.kind,
        model.param_count(),
        outcome.steps,
        outcome.seconds,
        outcome.loss_curve.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn load_model(config: &RunConfig, checkpoint: &Path) -> Result<Box<dyn ChannelModel>> {
    let mut model = build(config)?;
    model
        .params_mut()
        .load_into(checkpoint)
        .with_context(|| format!("loading {}", checkpoint.display()))?;
    Ok(model)
}

fn eval(config: &RunConfig, data: &Path, checkpoint: Option<PathBuf>, cli: &Cli) -> Result<()> {
    let test = Samples::from_dataset(&load_dataset(cli, data, "test.wvfd", config)?);
    let train_len = load_dataset(cli, data, "train.wvfd", config).map(|d| d.len()).ok();
    let checkpoint = checkpoint.unwrap_or_else(|| cli.out.join("model.wvfp"));
    let model = load_model(config, &checkpoint)?;
    let start = std::time::Instant::now();
    let prediction = predict(model.as_ref(), &test.locations, 512);
    let report = nmse(&test, &prediction, None)?;
    let ratio = train_len.map(|n| CompressionRatio::new(test.antennas, test.frequencies, n, model.param_count()));
    let json = serde_json::json!({
        "model": config.model.kind,
        "nmse_db": report.nmse_db,
        "per_frequency_db": report.per_frequency_db,
        "per_antenna_db": report.per_antenna_db,
        "param_count": model.param_count(),
        "compression_ratio": ratio.map(|r| r.value()),
        "compression_ratio_fraction": ratio,
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
        "test_records": test.len(),
    });
    atomic_write(&cli.out.join("eval.json"), serde_json::to_string_pretty(&json)?.as_bytes())?;
    println!("NMSE {:.2} dB over {} test locations", report.nmse_db, test.len());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn omp(
    config: &RunConfig,
    data: &Path,
    cli: &Cli,
    sparsity: usize,
    angles: usize,
    delays: usize,
    references: usize,
    stride: usize,
) -> Result<()> {
    let train = load_dataset(cli, data, "train.wvfd", config)?;
    let test = load_dataset(cli, data, "test.wvfd", config)?;
    let scene = config.setup.load_scene()?;
    let grid = config.setup.frequency_grid()?;
    let bank = DictionaryBank::build_product(&scene.array, &grid, angles, delays, (0.0, scene.max_delay()))?;
    let mut refs = Vec::new();
    for h in train.records.iter().take(references.max(1)) {
        refs.push((h.location, omp_decompose(h, h.location, &bank, sparsity)?));
    }
    let mut rows = Vec::new();
    let mut total = 0.0;
    for h in test.records.iter().step_by(stride.max(1)) {
        let est = two_stage_estimate(h.location, &refs, &bank)?;
        let nearest = refs.iter().map(|r| r.0.distance(h.location)).fold(f64::INFINITY, f64::min);
        let ratio = h.distance_sq(&est) / h.frobenius_norm_sq();
        total += ratio;
        rows.push(vec![
            format!("{}", h.location.x),
            format!("{}", h.location.y),
            format!("{nearest}"),
            format!("{}", to_db(ratio)),
        ]);
    }
    atomic_write(
        &cli.out.join("omp.csv"),
        &csv_bytes(&["x", "y", "reference_distance", "nmse_db"], &rows)?,
    )?;
    println!(
        "two-stage NMSE {:.2} dB over {} test locations ({} references, {} atoms, sparsity {sparsity})",
        to_db(total / rows.len().max(1) as f64),
        rows.len(),
        refs.len(),
        bank.atoms()
    );
    Ok(())
}

fn spectrum(config: &RunConfig, checkpoint: Option<PathBuf>, cli: &Cli) -> Result<()> {
    let scene = config.setup.load_scene()?;
    let grid = config.setup.frequency_grid()?;
    let (test, test_grid) = test_set(&scene, &grid, config.setup.test_spacing * config.setup.wavelength())?;
    let (jc, kc) = (scene.array.central_index(), grid.central_index());
    let radius = 1.0 / (2.0 * grid.reference_wavelength());
    let mut set = ArtifactSet::create(cli.out.join("spectrum"))?;
    let mut rows = Vec::new();
    let truth = test_grid.field(|r| test.entry(r, jc, kc))?;
    let s = spatial_spectrum(&truth);
    set.pgm("truth_real.pgm", truth.nx, truth.ny, &truth.real_part())?;
    set.pgm("truth_spectrum.pgm", s.nx, s.ny, &s.log_magnitude())?;
    rows.push(vec!["truth".to_string(), format!("{}", s.low_frequency_ratio(radius))]);
    if let Some(path) = checkpoint {
        let model = load_model(config, &path)?;
        let p = predict(model.as_ref(), &test.locations, 512);
        let cols = p.cols;
        let field = test_grid.field(|r| {
            let n = r * cols + jc * grid.len() + kc;
            num_complex::Complex64::new(p.re[n], p.im[n])
        })?;
        let s = spatial_spectrum(&field);
        set.pgm("model_real.pgm", field.nx, field.ny, &field.real_part())?;
        set.pgm("model_spectrum.pgm", s.nx, s.ny, &s.log_magnitude())?;
        rows.push(vec![config.model.kind.to_string(), format!("{}", s.low_frequency_ratio(radius))]);
    }
    set.csv("spectrum.csv", &["field", "low_frequency_ratio"], &rows)?;
    let dir = set.commit()?;
    for r in &rows {
        println!("{}: low-frequency energy ratio {}", r[0], r[1]);
    }
    println!("maps written to {}", dir.display());
    Ok(())
}

fn experiment(name: &str, paper_scale: bool, manifest: Option<PathBuf>, seed: Option<u64>, out: &Path) -> Result<()> {
    let manifest = match manifest {
        Some(p) => Manifest::load(&p)?,
        None => Manifest::builtin(),
    };
    let names: Vec<String> = if name == "all" {
        EXPERIMENTS.iter().map(|s| s.to_string()).collect()
    } else {
        vec![name.to_string()]
    };
    for n in names {
        let mut spec = manifest.spec(&n, paper_scale)?.clone();
        if let Some(seed) = seed {
            spec.setup.seed = seed;
            spec.train.seed = seed;
        }
        let summary = run_experiment(&n, &spec, paper_scale, out)?;
        for r in &summary.runs {
            println!("{n}: {:<24} {:>10} params  NMSE {:>8.2} dB", r.label, r.parameters, r.nmse_db);
        }
    }
    Ok(())
}
