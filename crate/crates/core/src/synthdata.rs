//! XOR-GMM features, the two-block SBM, and their coupling (XOR-CSBM).

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

const MEAN_TOL: f64 = 1e-12;

/// Generative description of one XOR-CSBM instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsbmParams {
    pub n: usize,
    pub d: usize,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub sigma: f64,
    pub p: f64,
    pub q: f64,
}

impl CsbmParams {
    /// Means placed on the first two axes, `mu = (gamma/sqrt2) e1`,
    /// `nu = (gamma/sqrt2) e2`, so that `|mu - nu| = gamma`.
    pub fn with_separation(n: usize, d: usize, gamma: f64, sigma: f64, p: f64, q: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::param("default mean construction needs d >= 2"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::param(format!("separation must be finite and >= 0, got {gamma}")));
        }
        let norm = gamma / std::f64::consts::SQRT_2;
        let mut mu = vec![0.0; d];
        let mut nu = vec![0.0; d];
        mu[0] = norm;
        nu[1] = norm;
        let params = CsbmParams { n, d, mu, nu, sigma, p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::param("n and d must be positive"));
        }
        if self.mu.len() != self.d || self.nu.len() != self.d {
            return Err(Error::param(format!(
                "mean vectors must have length d = {} (got {} and {})",
                self.d,
                self.mu.len(),
                self.nu.len()
            )));
        }
        if self.mu.iter().chain(&self.nu).any(|v| !v.is_finite()) {
            return Err(Error::param("mean vectors must be finite"));
        }
        let nmu = norm(&self.mu);
        let nnu = norm(&self.nu);
        let scale = nmu.max(nnu);
        if dot(&self.mu, &self.nu).abs() > MEAN_TOL * nmu * nnu.max(f64::MIN_POSITIVE) {
            return Err(Error::param("mu and nu must be orthogonal"));
        }
        if (nmu - nnu).abs() > MEAN_TOL * scale {
            return Err(Error::param(format!("mu and nu must have equal norms ({nmu} vs {nnu})")));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        check_prob("p", self.p)?;
        check_prob("q", self.q)?;
        Ok(())
    }

    /// `gamma = |mu - nu|_2`.
    pub fn separation(&self) -> f64 {
        self.mu.iter().zip(&self.nu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }
}

/// Features, class labels `eps`, and mixture signs `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub eps: Vec<u8>,
    pub eta: Vec<u8>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn labels_f64(&self) -> Array1<f64> {
        self.eps.iter().map(|&e| e as f64).collect()
    }

    /// Indices of nodes in class `b`.
    pub fn class_indices(&self, b: u8) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.eps[i] == b).collect()
    }
}

/// Undirected graph with self-loops, stored as sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are symmetrized, duplicates
    /// dropped, and a self-loop is added at every node.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::Index { index: v, len: n });
                }
            }
            if a != b {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { neighbors })
    }

    pub(crate) fn from_sorted_lists(neighbors: Vec<Vec<usize>>) -> Self {
        debug_assert!(neighbors.iter().enumerate().all(|(i, l)| l.binary_search(&i).is_ok()));
        Graph { neighbors }
    }

    /// `A = I`.
    pub fn identity(n: usize) -> Self {
        Graph { neighbors: (0..n).map(|i| vec![i]).collect() }
    }

    /// Every pair connected, self-loops included.
    pub fn complete(n: usize) -> Self {
        Graph { neighbors: (0..n).map(|_| (0..n).collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Number of undirected non-loop edges.
    pub fn edge_count(&self) -> usize {
        (self.neighbors.iter().map(Vec::len).sum::<usize>() - self.n()) / 2
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut a = Array2::zeros((n, n));
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                a[[i, j]] = 1.0;
            }
        }
        a
    }
}

/// Samples `X ~ XOR-GMM(n, d, mu, nu, sigma^2)`.
///
/// Per row: `eps_i` then `eta_i` (fair coins), then `d` standard normals,
/// all from the features stream of `seed`.
pub fn sample_xor_gmm(params: &CsbmParams, seed: u64) -> Result<Dataset> {
    params.validate()?;
    let (n, d) = (params.n, params.d);
    let mut rng = stream_rng(seed, Stream::Features);
    let mut x = Array2::zeros((n, d));
    let mut eps = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        let e: u8 = rng.random::<bool>().into();
        let s: u8 = rng.random::<bool>().into();
        let sign = if s == 1 { 1.0 } else { -1.0 };
        let mean = if e == 0 { &params.mu } else { &params.nu };
        for k in 0..d {
            let g: f64 = rng.sample(StandardNormal);
            x[[i, k]] = sign * mean[k] + params.sigma * g;
        }
        eps.push(e);
        eta.push(s);
    }
    Ok(Dataset { x, eps, eta })
}

/// Samples the symmetric two-block SBM conditioned on labels `eps`.
pub fn sample_sbm(n: usize, p: f64, q: f64, eps: &[u8], seed: u64) -> Result<Graph> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    if eps.len() != n {
        return Err(Error::shape(format!("label vector has length {}, expected {n}", eps.len())));
    }
    if let Some(bad) = eps.iter().find(|&&e| e > 1) {
        return Err(Error::param(format!("labels must be 0/1, found {bad}")));
    }
    let mut rng = stream_rng(seed, Stream::Graph);
    let mut neighbors: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = if eps[i] == eps[j] { p } else { q };
            if rng.random::<f64>() < prob {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    // the self-loop was pushed first
    for list in &mut neighbors {
        list.sort_unstable();
    }
    Ok(Graph::from_sorted_lists(neighbors))
}

/// Samples `(A, X) ~ XOR-CSBM`. Features and graph use separate streams of `seed`.
pub fn sample_xor_csbm(params: &CsbmParams, seed: u64) -> Result<(Dataset, Graph)> {
    let ds = sample_xor_gmm(params, seed)?;
    let g = sample_sbm(params.n, params.p, params.q, &ds.eps, seed)?;
    Ok((ds, g))
}

/// Empirical feature means over class 0 and class 1.
pub fn class_means(ds: &Dataset) -> Result<(Array1<f64>, Array1<f64>)> {
    let mut sums = [Array1::<f64>::zeros(ds.d()), Array1::<f64>::zeros(ds.d())];
    let mut counts = [0usize; 2];
    for (row, &e) in ds.x.rows().into_iter().zip(&ds.eps) {
        sums[e as usize] += &row;
        counts[e as usize] += 1;
    }
    if counts.contains(&0) {
        return Err(Error::degenerate(format!(
            "both classes must be nonempty (sizes {} and {})",
            counts[0], counts[1]
        )));
    }
    let [s0, s1] = sums;
    Ok((s0 / counts[0] as f64, s1 / counts[1] as f64))
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must lie in [0, 1], got {v}")))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
