//! Exit codes and artifacts of the `effham` binary.

use std::path::Path;
use std::process::Command;

use effham::certify::{BoundCertificate, Claim, Status};
use effham::runner::{ExperimentConfig, ModelSource, RunManifest, Suite};

fn effham(args: &[&str], cwd: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_effham")).args(args).current_dir(cwd).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

#[test]
fn passing_runs_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(effham(&["corpus", "--count", "2", "--sites", "6", "--seed", "5", "--out", "c"], d).0, 0);
    let model = "c/nn6-s5.toml";
    let (code, text) = effham(&["build", model], d);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("\"boundary_norm\""));
    assert_eq!(effham(&["truncate", model, "--M", "8", "--out", "t"], d).0, 0);
    assert!(d.join("t/h_bar.op").exists());

    let (code, text) = effham(&["certify", "overlap-ii", "--model", model, "--out", "o"], d);
    assert_eq!(code, 0, "{text}");
    let manifest: RunManifest = serde_json::from_slice(&std::fs::read(d.join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.tally.total(), manifest.rows);
    let (code, text) = effham(&["report", "o/certificates.csv"], d);
    assert_eq!(code, 0);
    assert!(text.contains("overlap-window"));

    let (code, text) = effham(&["range-trunc", "--alpha", "3", "--ell", "2", "--q", "1", "--out", "r"], d);
    assert_eq!(code, 0, "{text}");
    let (code, text) = effham(&["counterexample", "--M", "10", "--N-max", "9", "--no-cross-check", "--out", "x"], d);
    assert_eq!(code, 0, "{text}");
    assert!(d.join("x/divergence.csv").exists());
}

#[test]
fn same_config_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        assert_eq!(effham(&["certify", "sandwich", "--count", "2", "--sites", "5", "--seed", "3", "--out", out], d).0, 0);
    }
    assert_eq!(std::fs::read(d.join("a/certificates.csv")).unwrap(), std::fs::read(d.join("b/certificates.csv")).unwrap());
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(effham(&["certify", "no-such-suite"], d).0, 2);
    assert_eq!(effham(&["certify", "overlap-i", "--sites", "20"], d).0, 2);
    assert_eq!(effham(&["certify", "overlap-i", "--M", ""], d).0, 2);
    assert_eq!(effham(&["counterexample", "--M", "16", "--N-max", "9"], d).0, 2);
    assert_eq!(effham(&["range-trunc", "--alpha", "1.5", "--ell", "2", "--q", "1"], d).0, 2);
    assert_eq!(effham(&["build", "missing.toml"], d).0, 2);
    assert!(!d.join("out").exists(), "config errors must not write artifacts");

    std::fs::write(d.join("bad.toml"), "suite = \"overlap-i\"\noutput_dir = \"o\"\n[grid]\ncutoffs = []\n").unwrap();
    let (code, text) = effham(&["certify", "overlap-i", "--config", "bad.toml"], d);
    assert_eq!(code, 2);
    assert!(text.contains("grid.cutoffs is empty"), "{text}");
}

#[test]
fn failing_rows_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut config = ExperimentConfig::new(Suite::OverlapI, d.join("o"));
    config.model = Some(ModelSource::Transverse { sites: 6, field: 0.5, seed: 1 });
    config.grid.pq = Some(vec![[0.0, 1.0]]);
    // A negative tolerance is rejected; a zero one keeps the verdicts.
    config.tolerance = Some(0.0);
    std::fs::write(d.join("ok.toml"), config.to_toml().unwrap()).unwrap();
    assert_eq!(effham(&["certify", "overlap-i", "--config", "ok.toml"], d).0, 0);

    // Reporting a CSV with a FAIL row exits 1.
    let mut row = BoundCertificate::judge(Claim::OverlapLow, &[("p", 0.0)], 0.9, 0.1, effham::certify::BoundKind::ProjectorNorm, 1e-8);
    row = row.for_model("m", Some(1));
    assert_eq!(row.status, Status::Fail);
    let mut csv = Vec::new();
    effham::certify::write_csv(&mut csv, &[row]).unwrap();
    std::fs::write(d.join("fail.csv"), csv).unwrap();
    assert_eq!(effham(&["report", "fail.csv"], d).0, 1);
}
