use std::path::Path;
use std::process::{Command, Output};

use xcsbm::experiment::sweep::read_sweep_csv;
use xcsbm::experiment::{SweepConfig, CSV_HEADER};
use xcsbm::network::Network;

fn xcsbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xcsbm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    let json = r#"{"n": 60, "trials": 2, "archs": ["MLP2", "2L-01"],
        "k_grid": {"min": 1.0, "max": 4.0, "count": 2, "relative": false},
        "train": {"epochs": 5}}"#;
    std::fs::write(&path, json).unwrap();
    path
}

#[test]
fn print_config_round_trips() {
    let o = xcsbm(&["--seed", "7", "--print-config"]);
    assert!(o.status.success());
    let cfg = SweepConfig::from_json(&stdout(&o)).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg, SweepConfig { seed: 7, ..SweepConfig::default() });
}

#[test]
fn sweep_writes_csv_and_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out = dir.path().join("run.csv");
    let o = xcsbm(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, CSV_HEADER);
    let rows = read_sweep_csv(&out).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    let thresholds = dir.path().join("run.thresholds.p0.2-q0.02.csv");
    let t = std::fs::read_to_string(thresholds).unwrap();
    assert_eq!(t.lines().next(), Some("regime,gamma,K"));
}

#[test]
fn train_saves_a_loadable_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let ckpt = dir.path().join("net.txt");
    let o = xcsbm(&["train", "--config", cfg.to_str().unwrap(), "--arch", "3L-011", "--out", ckpt.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(result["arch"], "3L-011");
    let net = Network::load(&ckpt).unwrap();
    assert_eq!(net.depth(), 3);
}

#[test]
fn gen_output_trains_as_external_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let inst = dir.path().join("inst");
    let o = xcsbm(&["gen", "--config", cfg.to_str().unwrap(), "--out", inst.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = |f: &str| inst.join(f).to_str().unwrap().to_string();
    let (e, f, l) = (path("edges.txt"), path("features.csv"), path("labels.txt"));
    let o = xcsbm(&["train", "--config", cfg.to_str().unwrap(), "--edges", &e, "--features", &f, "--labels", &l]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thresholds_prints_header() {
    let o = xcsbm(&["thresholds"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "regime,gamma,K"));
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(xcsbm(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(xcsbm(&["train", "--arch", "4L-0000"]).status.code(), Some(2));
}
