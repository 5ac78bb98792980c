use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::PlacementPlan;
use crate::train::TrainConfig;

/// Log-spaced grid of `K` values. With `relative` set, both endpoints are
/// multiplied by `sqrt(2 log n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub relative: bool,
}

impl Default for KGrid {
    fn default() -> Self {
        KGrid { min: 10f64.powf(-1.1), max: 10f64.powf(1.1), count: 40, relative: true }
    }
}

impl KGrid {
    pub fn values(&self, n: usize) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::Config("K grid needs at least one point".into()));
        }
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!("K grid endpoints must be positive, got [{}, {}]", self.min, self.max)));
        }
        if self.count > 1 && !(self.max > self.min) {
            return Err(Error::Config(format!("K grid must be increasing, got [{}, {}]", self.min, self.max)));
        }
        let scale = if self.relative { (2.0 * (n.max(2) as f64).ln()).sqrt() } else { 1.0 };
        if self.count == 1 {
            return Ok(vec![self.min * scale]);
        }
        let (a, b) = (self.min.ln(), self.max.ln());
        let step = (b - a) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| (a + step * i as f64).exp() * scale).collect())
    }
}

/// A named architecture: its label as written in the config and the parsed plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arch {
    pub name: String,
    pub plan: PlacementPlan,
}

/// Parses `kL-j1...jk` (one digit per layer) or the aliases `MLP2`, `MLP3`.
/// Depth is limited to 3, matching the CSV columns.
pub fn parse_arch(label: &str) -> Result<Arch> {
    let bad = |why: &str| Error::Config(format!("bad architecture label '{label}': {why}"));
    let plan = match label.to_ascii_uppercase().as_str() {
        "MLP1" => PlacementPlan::mlp(1),
        "MLP2" => PlacementPlan::mlp(2),
        "MLP3" => PlacementPlan::mlp(3),
        _ => {
            let (depth, digits) = label.split_once("L-").ok_or_else(|| bad("expected kL-j1...jk"))?;
            let depth: usize = depth.parse().map_err(|_| bad("depth is not an integer"))?;
            if !(1..=3).contains(&depth) {
                return Err(bad("depth must be 1, 2 or 3"));
            }
            let k: Vec<usize> = digits
                .chars()
                .map(|c| c.to_digit(10).map(|v| v as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("convolution counts must be digits"))?;
            if k.len() != depth {
                return Err(bad("need one convolution count per layer"));
            }
            PlacementPlan::new(k)
        }
    };
    Ok(Arch { name: label.to_string(), plan })
}

/// How a trial is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// One instance; train on a random node split, test on the rest.
    #[default]
    Transductive,
    /// Train on every node of one instance, test on an independent instance.
    Inductive,
}

/// A complete sweep description. Every field has a default, so `{}` is a
/// valid document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub k_grid: KGrid,
    /// `(p, q)` pairs.
    pub pq: Vec<(f64, f64)>,
    pub archs: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    /// Exponent slack in the MLP threshold of the companion file.
    pub threshold_epsilon: f64,
    pub train: TrainConfig,
    pub protocol: Protocol,
    pub out: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 400,
            d: 4,
            sigma: 0.5,
            k_grid: KGrid::default(),
            pq: vec![(0.2, 0.02)],
            archs: ["MLP2", "2L-01", "2L-02", "3L-010", "3L-011"].map(String::from).to_vec(),
            trials: 10,
            seed: 0,
            threshold_epsilon: 0.0,
            train: TrainConfig::default(),
            protocol: Protocol::Transductive,
            out: PathBuf::from("sweep.csv"),
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d < 2 {
            return Err(Error::Config(format!("need n >= 2 and d >= 2, got n={} d={}", self.n, self.d)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.pq.is_empty() || self.archs.is_empty() {
            return Err(Error::Config("need at least one (p, q) pair and one architecture".into()));
        }
        for &(p, q) in &self.pq {
            if !((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q)) {
                return Err(Error::Config(format!("edge probabilities must lie in [0, 1], got ({p}, {q})")));
            }
        }
        self.k_values()?;
        self.parsed_archs()?;
        self.train.validate()
    }

    pub fn k_values(&self) -> Result<Vec<f64>> {
        self.k_grid.values(self.n)
    }

    pub fn parsed_archs(&self) -> Result<Vec<Arch>> {
        self.archs.iter().map(|a| parse_arch(a)).collect()
    }

    /// Number of data rows a sweep writes.
    pub fn row_count(&self) -> usize {
        self.k_grid.count * self.archs.len() * self.pq.len() * self.trials
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arch_labels() {
        assert_eq!(parse_arch("3L-011").unwrap().plan.counts(), &[0, 1, 1]);
        assert_eq!(parse_arch("MLP2").unwrap().plan, PlacementPlan::mlp(2));
        assert_eq!(parse_arch("mlp3").unwrap().plan.label(), "3L-000");
        for bad in ["2L-0", "4L-0000", "2L-0a", "L-01", "GCN"] {
            assert!(parse_arch(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_is_log_spaced() {
        let g = KGrid { min: 1.0, max: 100.0, count: 3, relative: false };
        let v = g.values(400).unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-9);
        assert!(KGrid { min: 2.0, max: 1.0, count: 3, relative: false }.values(10).is_err());
        let v = KGrid::default().values(400).unwrap();
        assert_eq!(v.len(), 40);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_round_trips_and_defaults() {
        let cfg = SweepConfig::default();
        assert_eq!(SweepConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(SweepConfig::from_json("{}").unwrap(), cfg);
        assert_eq!(cfg.row_count(), 40 * 5 * 10);
        assert!(SweepConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"archs": ["2L-3"]}"#).is_err());
    }
}
