//! A small accuracy-vs-K sweep. Writes the CSV and threshold files to the
//! temp directory and prints mean curves with their 0.9 crossings.
//! Pass `inductive` to test on an independent instance instead of held-out nodes.

use xcsbm::experiment::{crossing_k, mean_curves, run_sweep, KGrid, Protocol, SweepConfig};

fn main() -> xcsbm::Result<()> {
    let protocol = match std::env::args().nth(1).as_deref() {
        Some("inductive") => Protocol::Inductive,
        _ => Protocol::Transductive,
    };
    let cfg = SweepConfig {
        protocol,
        k_grid: KGrid { min: 0.3, max: 30.0, count: 8, relative: false },
        archs: vec!["MLP2".into(), "2L-01".into(), "3L-011".into()],
        trials: 3,
        out: std::env::temp_dir().join("xcsbm-phase.csv"),
        ..SweepConfig::default()
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let (rows, paths) = run_sweep(&cfg, jobs)?;
    for ((arch, _, _), curve) in mean_curves(&rows) {
        let means: Vec<String> = curve.iter().map(|p| format!("{:.2}", p.mean)).collect();
        let cross = crossing_k(&curve, 0.9).map_or("none".into(), |k| format!("{k:.2}"));
        println!("{arch:<7} {}  K@0.9={cross}", means.join(" "));
    }
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}
