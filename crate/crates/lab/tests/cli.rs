use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const KERNEL_AT_0_1: f64 = 0.282_094_791_773_878_14;
const BOX_AT_0_QUARTER: f64 = 0.421_350_396_474_857_43;

fn heatlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn counterexample_writes_reports_and_slices() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatlab(&["counterexample"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS  counterexample"));
    let r = json(&dir.path().join("counterexample.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["experiment"], "counterexample");
    for a in r["assertions"].as_array().unwrap() {
        assert!(a["claim"].is_string() && a.get("expected").is_some() && a.get("observed").is_some());
    }
    let (header, rows) = csv_rows(&dir.path().join("counterexample_slices_alpha_1.csv"));
    assert_eq!(header, ["t_k", "slice_inf", "slice_sup"]);
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| r[1] <= r[2]));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["passed"], true);
}

#[test]
fn eval_grid_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("dirac_grid.toml");
    let o = heatlab(&["eval", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let (header, rows) = csv_rows(&dir.path().join("dirac_grid.csv"));
    assert_eq!(header, ["x1", "t", "value", "certified_error"]);
    assert_eq!(rows.len(), 6);
    assert!((rows[0][2] - KERNEL_AT_0_1).abs() < 1e-15);

    let cfg = dir.path().join("box.toml");
    std::fs::write(
        &cfg,
        "experiment = \"eval_grid\"\nmeasure = \"box_unit\"\n[grid]\npoints = [[0.0]]\ntimes = [0.25]\n[output]\nname = \"box\"\n",
    )
    .unwrap();
    let o = heatlab(&["eval", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let (_, rows) = csv_rows(&dir.path().join("box.csv"));
    assert!((rows[0][2] - BOX_AT_0_QUARTER).abs() < 1e-12);
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wrong.toml");
    std::fs::write(
        &cfg,
        "experiment = \"two_ray\"\nmeasure = \"box_unit\"\nrays = [1.0, -1.0]\nexpected_difference = 0.0\n",
    )
    .unwrap();
    let o = heatlab(&["two-ray", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL") && stdout.contains("ray limits differ by the expected amount"));
    let r = json(&dir.path().join("two_ray.json"));
    let a = r["assertions"].as_array().unwrap().iter().find(|a| a["passed"] == false).unwrap();
    assert_eq!(a["expected"], 0.0);
    assert!(a["observed"].as_f64().unwrap() > 0.5);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"ray\"\nmeasure = \"no_such\"\n").unwrap();
    assert_eq!(heatlab(&["ray", "--config", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
    let cfg = scenario("box_limit.toml");
    assert_eq!(heatlab(&["ray", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(heatlab(&["counterexample", "--jobs", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(heatlab(&["counterexample", "--tol", "-1"], dir.path()).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    let o = heatlab(&["ray", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));
}

#[test]
fn global_flags_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = heatlab(&["identities", "--seed", "3", "--tol", "1e-9", "--jobs", "2"], dir.path());
    assert!(o.status.success());
    let r = json(&dir.path().join("identities.json"));
    assert_eq!(r["seed"], 3);
    assert_eq!(r["settings"]["tol_eval"], 1e-9);
    let other = tempfile::tempdir().unwrap();
    assert!(heatlab(&["identities", "--seed", "4"], other.path()).status.success());
    let s = json(&other.path().join("identities.json"));
    assert_ne!(r["evidence"]["draws"], s["evidence"]["draws"]);
}

#[test]
fn shipped_scenarios_pass() {
    let dir = tempfile::tempdir().unwrap();
    for (file, cmd) in [
        ("box_limit.toml", "limit"),
        ("mixture_converse.toml", "verify"),
        ("dirac_grid.toml", "eval"),
        ("windowed_2d.toml", "verify"),
        ("cantor_two_ray.toml", "two-ray"),
    ] {
        let cfg = scenario(file);
        let o = heatlab(&[cmd, "--config", cfg.to_str().unwrap()], dir.path());
        assert!(o.status.success(), "{file}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
