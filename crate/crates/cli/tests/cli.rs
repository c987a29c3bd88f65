//! End-to-end tests of the experiment driver binary: exit codes, artifact
//! layout, determinism across re-runs and worker counts, config loading.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levysup"))
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out_dir);
    cmd.output().expect("spawn levysup")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn verify_theorem_model_a_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["verify-theorem", "--model", "A", "--reps", "20000", "--seed", "42"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("RESULT: PASS"), "{stdout}");
    for f in ["samples_geometric.csv", "samples_sigma.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["passed"], serde_json::json!(true));
    assert_eq!(report["seed"], serde_json::json!(42));
}

#[test]
fn verify_theorem_refuses_supercritical_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-theorem", "--model", "B", "--reps", "100"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("verify-counterexample"), "{stderr}");
}

#[test]
fn verify_theorem_gamma_c_needs_truncation_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-theorem", "--model", "A-gammaC", "--reps", "100"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--trunc-level"));

    let dir2 = tempfile::tempdir().unwrap();
    let out2 = run(
        &[
            "verify-theorem",
            "--model",
            "A-gammaC",
            "--trunc-level",
            "64",
            "--reps",
            "20000",
        ],
        dir2.path(),
    );
    assert!(out2.status.success(), "stderr: {}", String::from_utf8_lossy(&out2.stderr));
}

#[test]
fn counterexample_rejects_equality_and_refuses_subcritical() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["verify-counterexample", "--model", "B", "--reps", "20000"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let dir2 = tempfile::tempdir().unwrap();
    let out2 = run(&["verify-counterexample", "--model", "A", "--reps", "100"], dir2.path());
    assert_eq!(out2.status.code(), Some(2));
}

#[test]
fn sample_reruns_are_byte_identical() {
    let base = tempfile::tempdir().unwrap();
    let (d1, d2, d3) = (base.path().join("r1"), base.path().join("r2"), base.path().join("r3"));
    let args = ["sample", "--model", "A", "--sampler", "sigma", "--reps", "5000", "--seed", "7"];
    assert!(run(&args, &d1).status.success());
    assert!(run(&args, &d2).status.success());
    let mut with_workers = bin();
    with_workers.args(args).args(["--workers", "2"]).arg("--out").arg(&d3);
    assert!(with_workers.output().unwrap().status.success());

    let csv1 = read(&d1, "samples.csv");
    assert_eq!(csv1, read(&d2, "samples.csv"));
    assert_eq!(csv1, read(&d3, "samples.csv"));
    assert_eq!(read(&d1, "samples.json"), read(&d3, "samples.json"));

    // A different seed must produce different bytes.
    let d4 = base.path().join("r4");
    let args4 = ["sample", "--model", "A", "--sampler", "sigma", "--reps", "5000", "--seed", "8"];
    assert!(run(&args4, &d4).status.success());
    assert_ne!(csv1, read(&d4, "samples.csv"));
}

#[test]
fn model_config_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("models.cfg");
    fs::write(
        &config,
        "# custom spec equal to the A preset\n\
         [mine]\n\
         drift = 1.0\n\
         z.family = exponential\n\
         z.rate = 0.5\n\
         z.theta = 1.0\n\
         c.family = exponential\n\
         c.rate = 0.3\n\
         c.theta = 2.0\n",
    )
    .unwrap();
    let out_custom = dir.path().join("custom");
    let mut cmd = bin();
    cmd.args(["sample", "--sampler", "sigma", "--reps", "2000", "--seed", "5"])
        .args(["--config", config.to_str().unwrap(), "--model", "mine"])
        .arg("--out")
        .arg(&out_custom);
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // Byte-identical to the preset run with the same seed.
    let out_preset = dir.path().join("preset");
    assert!(run(
        &["sample", "--model", "A", "--sampler", "sigma", "--reps", "2000", "--seed", "5"],
        &out_preset
    )
    .status
    .success());
    assert_eq!(read(&out_custom, "samples.csv"), read(&out_preset, "samples.csv"));

    // Unknown section name is a usage error.
    let mut bad = bin();
    bad.args(["sample", "--config", config.to_str().unwrap(), "--model", "nope"])
        .arg("--out")
        .arg(dir.path().join("bad"));
    assert_eq!(bad.output().unwrap().status.code(), Some(2));
}

#[test]
fn env_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out_env = dir.path().join("env");
    let mut cmd = bin();
    cmd.args(["sample", "--model", "A", "--sampler", "geometric", "--reps", "1000"])
        .env("LEVYSUP_SEED", "99")
        .arg("--out")
        .arg(&out_env);
    assert!(cmd.output().unwrap().status.success());
    let sidecar: serde_json::Value =
        serde_json::from_str(&read(&out_env, "samples.json")).unwrap();
    assert_eq!(sidecar["seed"], serde_json::json!(99));
}

#[test]
fn crossing_writes_tabulated_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["verify-crossing", "--model", "D", "--reps", "10000", "--seed", "3"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let cdf = read(dir.path(), "crossing_cdf.csv");
    assert!(cdf.starts_with("x,cdf\n"));
    assert!(cdf.lines().count() > 100);
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    // Model D crosses with certainty through Z.
    let p = report["p_cross_by_z"].as_f64().unwrap();
    assert!((p - 1.0).abs() < 1e-8, "p {p}");
}

#[test]
fn convergence_rejects_unknown_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["convergence", "--model", "A", "--scheme", "bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
