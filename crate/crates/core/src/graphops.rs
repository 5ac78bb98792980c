//! Normalized adjacency operators, K-step convolution, and neighbourhood
//! statistics used to check degree / common-neighbour concentration and the
//! variance-reduction factor of repeated convolutions.

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::synthdata::{Dataset, Graph};

/// Constant multiplying the `sqrt(log n / mean)` deviation scale in the
/// concentration reports. Asymptotic statements hide it; 5 is generous
/// enough for every density used in the test suite.
pub const DEFAULT_BOUND_CONSTANT: f64 = 5.0;

/// Largest number of node pairs a common-neighbour report inspects before
/// switching to a seeded subsample.
pub const DEFAULT_MAX_PAIRS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// `D^-1 A`
    #[default]
    Row,
    /// `D^-1/2 A D^-1/2`
    Symmetric,
}

/// A normalized adjacency matrix in CSR form. The sparsity pattern is the
/// adjacency pattern of the source graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvOperator {
    mode: NormMode,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Builds the normalized operator of `g`.
pub fn normalize(g: &Graph, mode: NormMode) -> Result<ConvOperator> {
    let n = g.n();
    let degrees = g.degrees();
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::degenerate(format!("node {i} has degree 0")));
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        for &j in g.neighbors(i) {
            let v = match mode {
                NormMode::Row => 1.0 / degrees[i] as f64,
                NormMode::Symmetric => 1.0 / ((degrees[i] * degrees[j]) as f64).sqrt(),
            };
            cols.push(j);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(ConvOperator { mode, row_ptr, cols, vals })
}

impl ConvOperator {
    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    fn check_rows(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.nrows() != self.n() {
            return Err(Error::shape(format!(
                "operator is {n}x{n} but input has {} rows",
                x.nrows(),
                n = self.n()
            )));
        }
        Ok(())
    }

    /// `M x`
    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_rows(&x)?;
        let mut out = Array2::zeros(x.raw_dim());
        out.outer_iter_mut().into_par_iter().enumerate().for_each(|(i, mut row)| {
            for (j, v) in self.row(i) {
                row.scaled_add(v, &x.row(j));
            }
        });
        Ok(out)
    }

    /// `M^T x`, the adjoint of [`ConvOperator::apply`].
    pub fn apply_transpose(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_rows(&x)?;
        match self.mode {
            // symmetric normalization of a symmetric pattern is its own transpose
            NormMode::Symmetric => self.apply(x),
            NormMode::Row => {
                let mut out = Array2::zeros(x.raw_dim());
                for i in 0..self.n() {
                    for (j, v) in self.row(i) {
                        out.row_mut(j).scaled_add(v, &x.row(i));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Row-vector product `v^T M`.
    pub(crate) fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (k, &vk) in v.iter().enumerate() {
            if vk != 0.0 {
                for (j, m) in self.row(k) {
                    out[j] += vk * m;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for (j, v) in self.row(i) {
                m[[i, j]] = v;
            }
        }
        m
    }
}

/// `M^k x`, evaluated as `k` successive sparse products. `k = 0` returns `x`.
pub fn convolve(op: &ConvOperator, x: ArrayView2<f64>, k: usize) -> Result<Array2<f64>> {
    op.check_rows(&x)?;
    let mut cur = x.to_owned();
    for _ in 0..k {
        cur = op.apply(cur.view())?;
    }
    Ok(cur)
}

/// `(M^T)^k x`.
pub fn convolve_transpose(op: &ConvOperator, x: ArrayView2<f64>, k: usize) -> Result<Array2<f64>> {
    op.check_rows(&x)?;
    let mut cur = x.to_owned();
    for _ in 0..k {
        cur = op.apply_transpose(cur.view())?;
    }
    Ok(cur)
}

/// `|N_i ∩ N_j|`, self-loops included.
pub fn common_neighbors(g: &Graph, i: usize, j: usize) -> Result<usize> {
    let n = g.n();
    for v in [i, j] {
        if v >= n {
            return Err(Error::Index { index: v, len: n });
        }
    }
    Ok(sorted_intersection(g.neighbors(i), g.neighbors(j)))
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

/// Exact per-node variance multiplier of a `k`-fold row-normalized
/// convolution together with the degree-concentrated approximation
/// `Delta^{-2k} sum_j A^k(i, j)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub exact: f64,
    pub delta_approx: f64,
}

/// `rho(k)` at node `i`: `sum_j M_ij^2` for `M = (D^-1 A)^k`.
pub fn variance_reduction_rho(g: &Graph, k: usize, i: usize) -> Result<f64> {
    let op = normalize(g, NormMode::Row)?;
    rho_with_operator(&op, k, i)
}

/// Same as [`variance_reduction_rho`] against a prebuilt row-mode operator.
pub fn rho_with_operator(op: &ConvOperator, k: usize, i: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("rho needs k >= 1"));
    }
    if op.mode() != NormMode::Row {
        return Err(Error::param("rho is defined for the row-normalized operator"));
    }
    let n = op.n();
    if i >= n {
        return Err(Error::Index { index: i, len: n });
    }
    let mut row = vec![0.0; n];
    row[i] = 1.0;
    for _ in 0..k {
        row = op.left_mul(&row);
    }
    Ok(row.iter().map(|v| v * v).sum())
}

/// Both the exact `rho(k)` and the degree-concentrated approximation with the given
/// expected degree `delta`.
pub fn variance_reduction_estimate(g: &Graph, k: usize, i: usize, delta: f64) -> Result<RhoEstimate> {
    let exact = variance_reduction_rho(g, k, i)?;
    // path counts: row i of A^k
    let n = g.n();
    let mut row = vec![0.0; n];
    row[i] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; n];
        for (v, &rv) in row.iter().enumerate() {
            if rv != 0.0 {
                for &j in g.neighbors(v) {
                    next[j] += rv;
                }
            }
        }
        row = next;
    }
    let paths: f64 = row.iter().map(|v| v * v).sum();
    Ok(RhoEstimate { exact, delta_approx: paths / delta.powi(2 * k as i32) })
}

/// `rho(k)` at each of `nodes`, computed in parallel.
pub fn rho_profile(g: &Graph, k: usize, nodes: &[usize]) -> Result<Vec<f64>> {
    let op = normalize(g, NormMode::Row)?;
    nodes.par_iter().map(|&i| rho_with_operator(&op, k, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub quantity: String,
    /// Theoretical center. For common neighbours this is the same-class center.
    pub center: f64,
    /// Cross-class center, for common-neighbour reports.
    pub cross_center: Option<f64>,
    pub max_rel_deviation: f64,
    pub predicted_bound: f64,
    pub pass: bool,
}

impl ConcentrationReport {
    fn new(quantity: &str, center: f64, cross_center: Option<f64>, dev: f64, bound: f64) -> Self {
        ConcentrationReport {
            quantity: quantity.to_string(),
            center,
            cross_center,
            max_rel_deviation: dev,
            predicted_bound: bound,
            pass: dev <= bound,
        }
    }
}

/// Compares every degree against `Delta = (n/2)(p+q)`; the bound is
/// `C sqrt((c+1) log n / (n (p+q)))`.
pub fn degree_concentration_report(g: &Graph, p: f64, q: f64, c: f64) -> ConcentrationReport {
    degree_concentration_report_with(g, p, q, c, DEFAULT_BOUND_CONSTANT)
}

pub fn degree_concentration_report_with(g: &Graph, p: f64, q: f64, c: f64, constant: f64) -> ConcentrationReport {
    let n = g.n() as f64;
    let delta = n / 2.0 * (p + q);
    let dev = g
        .degrees()
        .iter()
        .map(|&d| relative_deviation(d as f64, delta))
        .fold(0.0, f64::max);
    let bound = constant * ((c + 1.0) * n.ln() / (n * (p + q))).sqrt();
    ConcentrationReport::new("degree", delta, None, dev, bound)
}

#[derive(Debug, Clone, Copy)]
pub struct PairSampling {
    pub constant: f64,
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        PairSampling { constant: DEFAULT_BOUND_CONSTANT, max_pairs: DEFAULT_MAX_PAIRS, seed: 0 }
    }
}

/// Compares `|N_i ∩ N_j|` against `(n/2)(p^2+q^2)` for same-class pairs and
/// `npq` for cross-class pairs. The bound is `C sqrt((c+2) log n / m)` with
/// `m` the smaller positive center. All pairs are inspected when there are at
/// most `max_pairs` of them; otherwise a seeded uniform sample of distinct
/// pairs is used.
pub fn common_neighbor_concentration_report(g: &Graph, eps: &[u8], p: f64, q: f64, c: f64) -> ConcentrationReport {
    common_neighbor_concentration_report_with(g, eps, p, q, c, &PairSampling::default())
}

pub fn common_neighbor_concentration_report_with(
    g: &Graph,
    eps: &[u8],
    p: f64,
    q: f64,
    c: f64,
    opts: &PairSampling,
) -> ConcentrationReport {
    let n = g.n();
    let nf = n as f64;
    let same = nf / 2.0 * (p * p + q * q);
    let cross = nf * p * q;
    let total_pairs = n * n.saturating_sub(1) / 2;
    let pairs: Vec<(usize, usize)> = if total_pairs <= opts.max_pairs {
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
    } else {
        let mut rng = stream_rng(opts.seed, Stream::MonteCarlo);
        (0..opts.max_pairs)
            .map(|_| {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                (i.min(j), i.max(j))
            })
            .collect()
    };
    let dev = pairs
        .par_iter()
        .map(|&(i, j)| {
            let count = sorted_intersection(g.neighbors(i), g.neighbors(j)) as f64;
            let center = if eps[i] == eps[j] { same } else { cross };
            relative_deviation(count, center)
        })
        .reduce(|| 0.0, f64::max);
    let min_center = [same, cross].into_iter().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    let bound = opts.constant * ((c + 2.0) * nf.ln() / min_center).sqrt();
    ConcentrationReport::new("common_neighbors", same, Some(cross), dev, bound)
}

fn relative_deviation(value: f64, center: f64) -> f64 {
    if center > 0.0 {
        (value - center).abs() / center
    } else if value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Shrinkage of the class-mean gap under one row-normalized convolution,
/// measured on the sign-resolved components.
///
/// Only nodes with `eta = 1` enter the means, so the raw gap is the gap
/// between the `+mu` and `+nu` components; the convolution itself runs over
/// all nodes, mixing signs exactly as a first-layer convolution would.
/// Returns `|mean(X~ | C_mu) - mean(X~ | C_nu)| / |mean(X | C_mu) - mean(X | C_nu)|`
/// with `X~ = D^-1 A X`.
pub fn mean_collapse_ratio(ds: &Dataset, g: &Graph) -> Result<f64> {
    if g.n() != ds.n() {
        return Err(Error::shape(format!("graph has {} nodes, dataset {}", g.n(), ds.n())));
    }
    let op = normalize(g, NormMode::Row)?;
    let conv = op.apply(ds.x.view())?;
    let group = |b: u8| -> Vec<usize> { (0..ds.n()).filter(|&i| ds.eps[i] == b && ds.eta[i] == 1).collect() };
    let (g0, g1) = (group(0), group(1));
    if g0.is_empty() || g1.is_empty() {
        return Err(Error::degenerate("both classes need nodes with positive sign"));
    }
    let mean_of = |m: &Array2<f64>, idx: &[usize]| -> Array1<f64> {
        let mut s = Array1::zeros(m.ncols());
        for &i in idx {
            s += &m.row(i);
        }
        s / idx.len() as f64
    };
    let raw = mean_of(&ds.x, &g0) - mean_of(&ds.x, &g1);
    let smoothed = mean_of(&conv, &g0) - mean_of(&conv, &g1);
    let denom = raw.dot(&raw).sqrt();
    if denom == 0.0 {
        return Err(Error::degenerate("raw component means coincide"));
    }
    Ok(smoothed.dot(&smoothed).sqrt() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthdata::{sample_sbm, sample_xor_csbm, CsbmParams};
    use ndarray::array;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn balanced(n: usize) -> Vec<u8> {
        (0..n).map(|i| (i % 2) as u8).collect()
    }

    #[test]
    fn identity_graph_gives_identity_operator() {
        let g = Graph::identity(4);
        for mode in [NormMode::Row, NormMode::Symmetric] {
            let m = normalize(&g, mode).unwrap().to_dense();
            assert_eq!(m, Array2::<f64>::eye(4));
        }
    }

    #[test]
    fn path_row_mode_entries() {
        let m = normalize(&path3(), NormMode::Row).unwrap().to_dense();
        for j in 0..3 {
            assert!((m[[1, j]] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(m.row(0).to_vec(), vec![0.5, 0.5, 0.0]);
        for row in m.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_mode_is_symmetric() {
        let g = sample_sbm(60, 0.3, 0.1, &balanced(60), 3).unwrap();
        let m = normalize(&g, NormMode::Symmetric).unwrap().to_dense();
        for i in 0..60 {
            for j in 0..60 {
                assert!((m[[i, j]] - m[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convolve_cases() {
        let op = normalize(&path3(), NormMode::Row).unwrap();
        let x = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        assert_eq!(convolve(&op, x.view(), 0).unwrap(), x);
        let once = convolve(&op, x.view(), 1).unwrap();
        assert_eq!(once.row(0).to_vec(), vec![0.5, 0.5]);
        let twice = convolve(&op, x.view(), 2).unwrap();
        assert_eq!(twice, convolve(&op, once.view(), 1).unwrap());
        let bad = Array2::<f64>::zeros((2, 2));
        assert!(matches!(convolve(&op, bad.view(), 1), Err(Error::Shape(_))));
    }

    #[test]
    fn k_fold_rows_sum_to_one() {
        let g = sample_sbm(80, 0.2, 0.05, &balanced(80), 1).unwrap();
        let op = normalize(&g, NormMode::Row).unwrap();
        let ones = Array2::<f64>::ones((80, 1));
        for k in 1..=3 {
            let r = convolve(&op, ones.view(), k).unwrap();
            assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn transpose_is_adjoint() {
        use rand::Rng;
        let g = sample_sbm(50, 0.3, 0.1, &balanced(50), 8).unwrap();
        let mut rng = stream_rng(1, Stream::MonteCarlo);
        let u = Array2::from_shape_fn((50, 3), |_| rng.random::<f64>() - 0.5);
        let v = Array2::from_shape_fn((50, 3), |_| rng.random::<f64>() - 0.5);
        for mode in [NormMode::Row, NormMode::Symmetric] {
            let op = normalize(&g, mode).unwrap();
            let lhs = (&op.apply(u.view()).unwrap() * &v).sum();
            let rhs = (&u * &op.apply_transpose(v.view()).unwrap()).sum();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn common_neighbor_cases() {
        let g = Graph::identity(5);
        assert_eq!(common_neighbors(&g, 0, 3).unwrap(), 0);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(common_neighbors(&tri, i, j).unwrap(), 3);
        }
        let k = Graph::complete(7);
        assert_eq!(common_neighbors(&k, 2, 5).unwrap(), 7);
        assert!(matches!(common_neighbors(&k, 2, 7), Err(Error::Index { .. })));
    }

    #[test]
    fn rho_special_graphs() {
        let g = Graph::identity(6);
        for k in 1..=3 {
            assert_eq!(variance_reduction_rho(&g, k, 2).unwrap(), 1.0);
        }
        let n = 9;
        let g = Graph::complete(n);
        let r = variance_reduction_rho(&g, 1, 0).unwrap();
        assert!((r - 1.0 / n as f64).abs() < 1e-15);
        assert!(variance_reduction_rho(&g, 0, 0).is_err());
    }

    #[test]
    fn rho_bounded_and_monotone_on_transitive_graphs() {
        let cycle: Vec<(usize, usize)> = (0..12).map(|i| (i, (i + 1) % 12)).collect();
        let graphs = [Graph::complete(10), Graph::from_edges(12, &cycle).unwrap()];
        for g in &graphs {
            let mut prev = 1.0;
            for k in 1..=5 {
                let r = variance_reduction_rho(g, k, 0).unwrap();
                assert!(r > 0.0 && r <= 1.0);
                assert!(r <= prev + 1e-15);
                prev = r;
            }
        }
    }

    #[test]
    fn rho_exact_matches_dense_power() {
        let g = sample_sbm(40, 0.3, 0.1, &balanced(40), 4).unwrap();
        let m = normalize(&g, NormMode::Row).unwrap().to_dense();
        let m2 = m.dot(&m);
        for i in [0, 7, 39] {
            let dense: f64 = m2.row(i).iter().map(|v| v * v).sum();
            assert!((variance_reduction_rho(&g, 2, i).unwrap() - dense).abs() < 1e-14);
        }
    }

    #[test]
    fn rho1_median_matches_inverse_degree_scale() {
        let (n, p, q) = (2000, 0.2, 0.02);
        let g = sample_sbm(n, p, q, &balanced(n), 12).unwrap();
        let nodes: Vec<usize> = (0..n).step_by(10).collect();
        let mut r = rho_profile(&g, 1, &nodes).unwrap();
        r.sort_by(f64::total_cmp);
        let median = r[r.len() / 2];
        let target = 2.0 / (n as f64 * (p + q));
        assert!((median / target - 1.0).abs() < 0.1, "{median} vs {target}");
    }

    #[test]
    fn delta_approximation_close_on_dense_graph() {
        let (n, p, q) = (600, 0.5, 0.3);
        let g = sample_sbm(n, p, q, &balanced(n), 2).unwrap();
        let delta = n as f64 / 2.0 * (p + q);
        let est = variance_reduction_estimate(&g, 2, 5, delta).unwrap();
        assert!((est.exact / est.delta_approx - 1.0).abs() < 0.3);
    }

    #[test]
    fn degree_report_cases() {
        let g = Graph::complete(30);
        let r = degree_concentration_report(&g, 1.0, 1.0, 1.0);
        assert_eq!(r.max_rel_deviation, 0.0);
        assert!(r.pass);

        let g = sample_sbm(5000, 0.2, 0.02, &balanced(5000), 5).unwrap();
        assert!(degree_concentration_report(&g, 0.2, 0.02, 1.0).pass);

        // sparse regime: only a flag, never an error
        let g = sample_sbm(50, 0.05, 0.01, &balanced(50), 5).unwrap();
        let r = degree_concentration_report(&g, 0.05, 0.01, 1.0);
        assert_eq!(r.pass, r.max_rel_deviation <= r.predicted_bound);
    }

    #[test]
    fn common_neighbor_report_cases() {
        let n = 40;
        let g = Graph::complete(n);
        let r = common_neighbor_concentration_report(&g, &balanced(n), 1.0, 1.0, 1.0);
        assert_eq!(r.max_rel_deviation, 0.0);

        let (n, p, q) = (3000, 0.3, 0.1);
        let g = sample_sbm(n, p, q, &balanced(n), 6).unwrap();
        let r = common_neighbor_concentration_report(&g, &balanced(n), p, q, 1.0);
        assert!((r.center - 150.0).abs() < 1e-9);
        assert!((r.cross_center.unwrap() - 90.0).abs() < 1e-9);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn pair_subsample_agrees_with_full_scan() {
        for (seed, (p, q)) in [(1u64, (0.5, 0.3)), (2, (0.05, 0.01)), (3, (0.3, 0.2))] {
            let n = 400;
            let eps = balanced(n);
            let g = sample_sbm(n, p, q, &eps, seed).unwrap();
            let full = common_neighbor_concentration_report(&g, &eps, p, q, 1.0);
            let opts = PairSampling { max_pairs: 20_000, seed, ..PairSampling::default() };
            let sub = common_neighbor_concentration_report_with(&g, &eps, p, q, 1.0, &opts);
            assert_eq!(full.pass, sub.pass, "p={p} q={q}");
            assert!(sub.max_rel_deviation <= full.max_rel_deviation);
        }
    }

    #[test]
    fn collapse_ratio_identity_is_one() {
        let p = CsbmParams::with_separation(200, 3, 2.0, 0.5, 0.0, 0.0).unwrap();
        let (ds, _) = sample_xor_csbm(&p, 1).unwrap();
        let r = mean_collapse_ratio(&ds, &Graph::identity(200)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_ratio_small_when_graph_uninformative() {
        let p = CsbmParams::with_separation(2000, 2, 2.0, 0.5, 0.3, 0.3).unwrap();
        let (ds, g) = sample_xor_csbm(&p, 2).unwrap();
        assert!(mean_collapse_ratio(&ds, &g).unwrap() <= 0.1);
    }

    #[test]
    fn collapse_ratio_rejects_degenerate_input() {
        let ds = Dataset { x: array![[1.0], [1.0]], eps: vec![0, 1], eta: vec![1, 1] };
        assert!(matches!(mean_collapse_ratio(&ds, &Graph::identity(2)), Err(Error::Degenerate(_))));
        let ds = Dataset { x: array![[1.0], [2.0]], eps: vec![0, 1], eta: vec![1, 0] };
        assert!(mean_collapse_ratio(&ds, &Graph::identity(2)).is_err());
    }
}
