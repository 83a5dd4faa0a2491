use std::fs;

use wavefield_experiments::artifacts::{pgm_bytes, ArtifactSet};
use wavefield_experiments::experiments::{run_experiment, EXPERIMENTS};
use wavefield_experiments::manifest::{ExperimentSpec, Manifest};
use wavefield_experiments::setup::SetupConfig;
use wavefield_experiments::train::TrainConfig;
use wavefield_experiments::ExperimentError;
use wavefield_nn::{ModelConfig, ModelKind};

fn tiny_spec() -> ExperimentSpec {
    ExperimentSpec {
        models: vec![ModelKind::MbPsiA],
        setup: SetupConfig {
            scene: "los-empty".into(),
            antennas: 4,
            subcarriers: 4,
            density: 20.0,
            test_spacing: 1.0,
            ..SetupConfig::default()
        },
        model: ModelConfig {
            t1: 16,
            t2: 8,
            t3: 8,
            t4: 16,
            t5: 8,
            t6: 8,
            width: 16,
            ..ModelConfig::default()
        },
        train: TrainConfig {
            epochs: 2,
            batch_size: 32,
            ..TrainConfig::default()
        },
        atoms: vec![8, 16],
        ..ExperimentSpec::default()
    }
}

#[test]
fn builtin_manifest_covers_every_experiment() {
    let m = Manifest::builtin();
    for name in EXPERIMENTS {
        let desk = m.spec(name, false).unwrap();
        let paper = m.spec(name, true).unwrap();
        assert!(!desk.models.is_empty());
        assert!(paper.model.atoms >= desk.model.atoms);
    }
    assert_eq!(m.spec("density", false).unwrap().densities, vec![0.1, 0.2, 0.5, 1.3]);
    assert!(matches!(m.spec("nonsense", false), Err(ExperimentError::UnknownExperiment { .. })));
}

#[test]
fn compression_experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = tiny_spec();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_experiment("compression", &spec, false, &a).unwrap();
    run_experiment("compression", &spec, false, &b).unwrap();
    let csv_a = fs::read(a.join("compression/compression.csv")).unwrap();
    let csv_b = fs::read(b.join("compression/compression.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,atoms,parameters,ratio_numerator,ratio_denominator,ratio,checkpoint_bytes,nmse_db"
    );
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let params: u128 = f[2].parse().unwrap();
        let num: u128 = f[3].parse().unwrap();
        assert_eq!(f[4].parse::<u128>().unwrap(), params);
        let na_ns_nl = 4 * 4 * 320;
        assert_eq!(num, 2 * na_ns_nl);
        let path = a.join(format!("compression/mb-psi-a_d{}.wvfp", f[1]));
        assert_eq!(fs::metadata(path).unwrap().len().to_string(), f[6]);
    }
    assert!(a.join("compression/report.json").is_file());
}

#[test]
fn reconstruction_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        models: vec![ModelKind::MbU, ModelKind::Mlp],
        ..tiny_spec()
    };
    let summary = run_experiment("reconstruction", &spec, false, dir.path()).unwrap();
    assert_eq!(summary.runs.len(), 2);
    for f in &summary.files {
        assert!(dir.path().join("reconstruction").join(f).is_file(), "{f}");
    }
    for f in ["truth_real.pgm", "mb-u_spectrum.pgm", "metrics.csv", "spectrum.csv", "slices.csv"] {
        assert!(summary.files.iter().any(|g| g == f), "{f}");
    }
    let pgm = fs::read(dir.path().join("reconstruction/truth_real.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n"));
}

#[test]
fn failed_experiment_leaves_no_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        densities: Vec::new(),
        ..tiny_spec()
    };
    assert!(matches!(run_experiment("density", &spec, false, dir.path()), Err(ExperimentError::Config(_))));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    assert!(run_experiment("bogus", &spec, false, dir.path()).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn artifact_set_replaces_previous_output_only_on_commit() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("exp");
    let mut first = ArtifactSet::create(&target).unwrap();
    first.write("a.txt", b"one").unwrap();
    first.commit().unwrap();
    {
        let mut second = ArtifactSet::create(&target).unwrap();
        second.write("b.txt", b"two").unwrap();
    }
    assert_eq!(fs::read(target.join("a.txt")).unwrap(), b"one");
    assert!(!target.join("b.txt").exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn pgm_scaling() {
    let bytes = pgm_bytes(2, 2, &[0.0, 1.0, 2.0, 4.0]);
    assert_eq!(&bytes[..11], b"P5\n2 2\n255\n");
    // Top image row is the last grid row.
    assert_eq!(&bytes[11..], &[128, 255, 0, 64]);
}
