use std::path::Path;
use std::process::{Command, Output};
use std::sync::atomic::AtomicBool;

use serde_json::Value;
use taperline::experiments::{self, RunConfig};

fn taperline(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taperline")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn negative_length_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[antenna]\nd_m = -0.2\n");
    let out = taperline(&["scatter", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("antenna.d_m"));
}

#[test]
fn unknown_keys_and_bad_toml_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["[wave]\nomega_grad_s = 5e9\n", "[antenna\nd_m = 0.2\n", "[thermal]\nn = 0.1\nt_cryo_mk = 50\n"] {
        let cfg = write_config(dir.path(), text);
        let out = taperline(&["entangle", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = taperline(&["scatter"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matched_uniform_line_does_not_reflect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[wave]\nv_in_c = 1\nv_out_c = 1\n[antenna]\nz_in_ohm = 50\nz_out_ohm = 50\n");
    let out = taperline(&["scatter", "--config", &cfg, "--out", "o", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("o/scatter.json"));
    assert!(doc["result"]["r_mag"].as_f64().unwrap() < 1e-10);
    assert!(!dir.path().join("o/scatter.csv").exists());
}

#[test]
fn extreme_contrast_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[antenna]\nz_in_ohm = 1e-9\nz_out_ohm = 1e15\nslices = 4\n");
    let out = taperline(&["scatter", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn lossless_channel_keeps_input_negativity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[thermal]\nn = 0.0083\nn_eff = 1250\n[antenna]\nr_r_override = 0\n");
    let out = taperline(&["entangle", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("o/entangle.json"));
    let neg = doc["result"]["report"]["negativity"].as_f64().unwrap();
    let nu_in = (1.0 + 2.0 * 0.0083) * (-2.0f64).exp();
    assert!((neg - (1.0 - nu_in) / (2.0 * nu_in)).abs() < 1e-12);
    assert!((neg - 3.13).abs() < 0.01);
    let echoed = RunConfig::from_json(&serde_json::to_string(&doc["config"]).unwrap()).unwrap();
    let mut expected = RunConfig::from_toml(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    expected.output.directory = "o".into();
    assert_eq!(echoed, expected);
}

#[test]
fn entangle_threshold_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[thermal]\nn = 0.0083\nn_eff = 1250\n[antenna]\nr_r_override = 0.05\n");
    taperline(&["entangle", "--config", &cfg, "--out", "o"], dir.path());
    let doc = read_json(&dir.path().join("o/entangle.json"));
    assert_eq!(doc["result"]["report"]["entangled"], Value::Bool(false));

    let cfg = write_config(dir.path(), "[channel]\nr = 0\n[antenna]\nr_r_override = 0.001\n");
    taperline(&["entangle", "--config", &cfg, "--out", "p"], dir.path());
    let doc = read_json(&dir.path().join("p/entangle.json"));
    assert_eq!(doc["result"]["report"]["negativity"].as_f64(), Some(0.0));
}

#[test]
fn fig6_and_scatter_agree_at_the_antenna_length() {
    let mut cfg = RunConfig::paper();
    cfg.figures.fig6.points = 3;
    cfg.antenna.slices = 20;
    let fig = experiments::fig6(&cfg, &AtomicBool::new(false)).unwrap();
    let scat = experiments::scatter(&cfg).unwrap();
    let r = scat.summary["r_mag"].as_f64().unwrap();
    let row = fig.tables[0].1.lines().find(|l| l.starts_with(&format!("{},", cfg.antenna.d_m))).expect("d in grid");
    let lin: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(lin, r);
}

#[test]
fn interrupted_runs_are_marked_partial() {
    let mut cfg = RunConfig::paper();
    cfg.figures.fig8.trials = 4;
    let out = experiments::fig8(&cfg, &AtomicBool::new(true)).unwrap();
    assert!(out.partial);
    assert_eq!(out.document(&cfg)["partial"], Value::Bool(true));
    let out = experiments::fig4(&cfg, &AtomicBool::new(true)).unwrap();
    assert!(out.partial);
}

#[test]
fn seed_and_format_flags_override_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[fig8]\ntrials = 3\nerror_fractions = [0, 0.01]\n[antenna]\nprofile = \"ansatz\"\nalpha = 30.1\nbeta = 4.86\n");
    let out = taperline(&["fig", "8", "--config", &cfg, "--seed", "18446744073709551615", "--out", "o", "--format", "csv,json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("o/fig8.json"));
    assert_eq!(doc["config"]["figures"]["fig8"]["seed"].as_u64(), Some(u64::MAX));
    let csv = std::fs::read_to_string(dir.path().join("o/fig8.csv")).unwrap();
    assert!(csv.starts_with("error_percent,mean_negativity_ratio,std,in_fit\n"));
    assert_eq!(csv.lines().count(), 3);
    let out = taperline(&["fig", "9", "--preset", "paper"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
