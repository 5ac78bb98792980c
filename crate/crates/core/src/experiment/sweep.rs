use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Arch, Protocol, SweepConfig};
use crate::error::{Error, Result};
use crate::rng::{derive, trial_seed};
use crate::synthdata::{sample_xor_csbm, CsbmParams};
use crate::theory::thresholds;
use crate::train::{init_network, train, train_inductive};

pub const CSV_HEADER: &str = "trial,K,p,q,arch,k1,k2,k3,train_acc,test_acc,train_loss,test_loss,seconds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Trial seed.
    pub trial: u64,
    #[serde(rename = "K")]
    pub k: f64,
    pub p: f64,
    pub q: f64,
    pub arch: String,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub k3: Option<usize>,
    pub train_acc: f64,
    pub test_acc: f64,
    pub train_loss: f64,
    pub test_loss: f64,
    pub seconds: f64,
}

/// Seed tag of the independent test instance under the inductive protocol.
const HELD_OUT_TAG: u64 = 0x7e57;

struct Task {
    p: f64,
    q: f64,
    k: f64,
    seed: u64,
}

fn run_task(cfg: &SweepConfig, archs: &[Arch], task: &Task) -> Result<Vec<SweepRow>> {
    let params = CsbmParams::with_separation(cfg.n, cfg.d, task.k * cfg.sigma, cfg.sigma, task.p, task.q)?;
    let (ds, g) = sample_xor_csbm(&params, task.seed)?;
    let held_out = match cfg.protocol {
        Protocol::Transductive => None,
        Protocol::Inductive => Some(sample_xor_csbm(&params, derive(task.seed, HELD_OUT_TAG))?),
    };
    archs
        .iter()
        .map(|arch| {
            let start = Instant::now();
            let net = init_network(cfg.d, &arch.plan, &cfg.train, task.seed)?;
            let (_, res) = match &held_out {
                None => train(&net, &ds, Some(&g), &arch.plan, &cfg.train, task.seed)?,
                Some((test_ds, test_g)) => {
                    train_inductive(&net, (&ds, Some(&g)), (test_ds, Some(test_g)), &arch.plan, &cfg.train, task.seed)?
                }
            };
            let k = arch.plan.counts();
            Ok(SweepRow {
                trial: task.seed,
                k: task.k,
                p: task.p,
                q: task.q,
                arch: arch.name.clone(),
                k1: k.first().copied(),
                k2: k.get(1).copied(),
                k3: k.get(2).copied(),
                train_acc: res.train_acc,
                test_acc: res.test_acc,
                train_loss: res.train_loss,
                test_loss: res.test_loss,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Runs every cell of the sweep and returns its rows in cell order
/// (`(p, q)`, then `K`, then trial, then architecture), independent of `jobs`.
/// Each trial samples a fresh instance shared by all architectures.
pub fn run_sweep_rows(cfg: &SweepConfig, jobs: usize) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let archs = cfg.parsed_archs()?;
    let ks = cfg.k_values()?;
    let mut tasks = Vec::with_capacity(cfg.pq.len() * ks.len() * cfg.trials);
    for (pi, &(p, q)) in cfg.pq.iter().enumerate() {
        for (ki, &k) in ks.iter().enumerate() {
            let cell = (pi * ks.len() + ki) as u64;
            for t in 0..cfg.trials {
                tasks.push(Task { p, q, k, seed: trial_seed(cfg.seed, cell, t as u64) });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let nested: Vec<Result<Vec<SweepRow>>> = pool.install(|| tasks.par_iter().map(|t| run_task(cfg, &archs, t)).collect());
    let mut rows = Vec::with_capacity(cfg.row_count());
    for r in nested {
        rows.extend(r?);
    }
    Ok(rows)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

/// Writes the version comment, the header, and one line per row.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# xcsbm {}", env!("CARGO_PKG_VERSION")).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(CSV_HEADER.split(',')).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`write_sweep_csv`].
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| csv_err(path, e))?.iter().map(String::from).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse { path: path.display().to_string(), line: 2, msg: "unexpected header".into() });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse { path: path.display().to_string(), line: i + 3, msg: e.to_string() })
        })
        .collect()
}

/// `<dir>/<stem>.thresholds.p{p}-q{q}.csv`
pub fn threshold_path(out: &Path, p: f64, q: f64) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}.thresholds.p{p}-q{q}.csv"))
}

pub fn write_thresholds(path: &Path, n: usize, p: f64, q: f64, sigma: f64, epsilon: f64) -> Result<()> {
    let set = thresholds(n, p, q, sigma, epsilon)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["regime", "gamma", "K"]).map_err(|e| csv_err(path, e))?;
    for (regime, gamma, k) in set.rows() {
        w.write_record([regime.as_str().to_string(), gamma.to_string(), k.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Runs the sweep, writes `cfg.out` and one threshold file per `(p, q)`.
/// Returns the rows and every path written.
pub fn run_sweep(cfg: &SweepConfig, jobs: usize) -> Result<(Vec<SweepRow>, Vec<PathBuf>)> {
    let rows = run_sweep_rows(cfg, jobs)?;
    write_sweep_csv(&cfg.out, &rows)?;
    let mut written = vec![cfg.out.clone()];
    for &(p, q) in &cfg.pq {
        let path = threshold_path(&cfg.out, p, q);
        write_thresholds(&path, cfg.n, p, q, cfg.sigma, cfg.threshold_epsilon)?;
        written.push(path);
    }
    Ok((rows, written))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Test-accuracy curves keyed by `(arch, p, q)` (probabilities as bit patterns),
/// one point per `K` in increasing order.
pub fn mean_curves(rows: &[SweepRow]) -> BTreeMap<(String, u64, u64), Vec<CurvePoint>> {
    let mut groups: BTreeMap<(String, u64, u64), BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.arch.clone(), r.p.to_bits(), r.q.to_bits()))
            .or_default()
            .entry(r.k.to_bits())
            .or_default()
            .push(r.test_acc);
    }
    groups
        .into_iter()
        .map(|(key, by_k)| {
            let mut pts: Vec<CurvePoint> = by_k
                .into_iter()
                .map(|(k, accs)| CurvePoint {
                    k: f64::from_bits(k),
                    mean: accs.iter().sum::<f64>() / accs.len() as f64,
                    min: accs.iter().copied().fold(f64::INFINITY, f64::min),
                    max: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    count: accs.len(),
                })
                .collect();
            pts.sort_by(|a, b| a.k.total_cmp(&b.k));
            (key, pts)
        })
        .collect()
}

/// First `K` at which the mean curve reaches `level`, interpolated linearly
/// in `log K` between the bracketing grid points. `None` if never reached.
pub fn crossing_k(curve: &[CurvePoint], level: f64) -> Option<f64> {
    let first = curve.first()?;
    if first.mean >= level {
        return Some(first.k);
    }
    curve.windows(2).find(|w| w[1].mean >= level).map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let t = (level - a.mean) / (b.mean - a.mean);
        (a.k.ln() + t * (b.k.ln() - a.k.ln())).exp()
    })
}
