use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn siegel(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn siegel")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_category(o: &Output) -> String {
    let line = String::from_utf8_lossy(&o.stderr);
    let v: Value = serde_json::from_str(line.lines().last().unwrap()).unwrap();
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn tower_three_levels_at_a_tenth() {
    let dir = tempfile::tempdir().unwrap();
    let o = siegel(dir.path(), &["tower", "--a", "0.1", "--levels", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("tower_summary.json"));
    assert_eq!(s["accepted_levels"], 3);
    assert_eq!(s["levels"].as_array().unwrap().len(), 4);
    let diag = &s["levels"][3]["diag"];
    assert_eq!(diag["accepted"], true);
    let m = json(&dir.path().join("manifest_tower.json"));
    assert_eq!(m["command"], "tower");
    assert_eq!(m["precision_bits"], 53);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn tower_output_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        assert_eq!(code(&siegel(d.path(), &["tower", "--a", "0.15,0.05", "--levels", "2"])), 0);
    }
    let h = |d: &tempfile::TempDir| json(&d.path().join("manifest_tower.json"))["outputs"][0]["sha256"].clone();
    assert_eq!(h(&d1), h(&d2));
}

#[test]
fn fixed_point_writes_artifact_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = siegel(dir.path(), &["fixed-point", "--tol", "1e-9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let z = dir.path().join("zeta_star.json");
    assert!(z.exists());
    let m = json(&dir.path().join("manifest_fixed_point.json"));
    assert_eq!(m["zeta_star_sha256"], m["outputs"][0]["sha256"]);
    let art = json(&z);
    assert!(art["fixed_point_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn levels_beyond_precision_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = siegel(dir.path(), &["tower", "--a", "0.2", "--levels", "5"]);
    assert_eq!(code(&o), 4);
    assert_eq!(stderr_category(&o), "precision_exhausted");
    // The partial summary is still written.
    assert_eq!(json(&dir.path().join("tower_summary.json"))["accepted_levels"], 3);
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = siegel(dir.path(), &["tower", "--a", "abc"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_category(&o), "invalid_input");
    assert_eq!(code(&siegel(dir.path(), &["tower", "--a", "1.5"])), 2);
    assert_eq!(code(&siegel(dir.path(), &["tower", "--a", "0.4"])), 2);
    assert_eq!(code(&siegel(dir.path(), &["no-such-command"])), 2);

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "eps_bar = 3.0\n").unwrap();
    let o = siegel(dir.path(), &["--config", cfg.to_str().unwrap(), "tower"]);
    assert_eq!(code(&o), 2);
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&siegel(dir.path(), &["--config", cfg.to_str().unwrap(), "tower"])), 2);
}

#[test]
fn missing_config_file_is_io() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let o = siegel(dir.path(), &["--config", missing.to_str().unwrap(), "tower"]);
    assert_eq!(code(&o), 7);
    assert_eq!(stderr_category(&o), "io");
}

#[test]
fn tangency_needs_cached_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = siegel(dir.path(), &["tangency", "--n", "2", "--k", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_category(&o), "missing_cache");
}

#[test]
fn config_file_sets_level_cap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.toml");
    std::fs::write(&cfg, "max_level = 2\n").unwrap();
    let o = siegel(dir.path(), &["--config", cfg.to_str().unwrap(), "tower", "--a", "0.1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("tower_summary.json"))["accepted_levels"], 2);
    let m = json(&dir.path().join("manifest_tower.json"));
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(m["config"]["max_level"], 2);
}
