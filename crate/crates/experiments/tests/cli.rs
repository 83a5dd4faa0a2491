use std::fs;
use std::process::Command;

const CONFIG: &str = r#"
[setup]
scene = "los-empty"
antennas = 4
subcarriers = 4
density = 20.0
test_spacing = 1.0

[model]
kind = "mb-psi-a"
atoms = 16
t1 = 16
t4 = 16

[train]
epochs = 2
batch_size = 32
"#;

fn wavefield(args: &[&str], cwd: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wavefield"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

#[test]
fn gen_train_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), CONFIG).unwrap();
    let base = ["--config", "run.toml", "--seed", "5", "--out", "out"];

    let missing = wavefield(&[&base[..], &["eval"]].concat(), dir.path());
    assert!(!missing.status.success());
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert!(msg.contains("wavefield gen --config run.toml --seed 5 --out out"), "{msg}");

    for cmd in ["gen", "train", "eval"] {
        let out = wavefield(&[&base[..], &[cmd]].concat(), dir.path());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/eval.json")).unwrap()).unwrap();
    assert!(report["nmse_db"].as_f64().unwrap().is_finite());
    assert_eq!(report["per_antenna_db"].as_array().unwrap().len(), 4);
    let eval = wavefield(&[&base[..], &["eval"]].concat(), dir.path());
    assert!(String::from_utf8_lossy(&eval.stdout).contains("NMSE"));
}

#[test]
fn unknown_experiment_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = wavefield(&["--out", "o", "experiment", "nope"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment 'nope'"));
}
