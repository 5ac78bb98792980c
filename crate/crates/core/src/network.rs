//! ReLU networks whose layer `l` computes `M^{k_l} H W + b`, the explicit
//! Bayes-optimal constructions, and closed-form output oracles.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphops::{convolve, ConvOperator};
use crate::synthdata::{norm, Graph};

/// Number of graph convolutions applied inside each layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacementPlan {
    k: Vec<usize>,
}

impl PlacementPlan {
    pub fn new(k: Vec<usize>) -> Self {
        PlacementPlan { k }
    }

    /// All-zero plan: a plain MLP.
    pub fn mlp(depth: usize) -> Self {
        PlacementPlan { k: vec![0; depth] }
    }

    pub fn depth(&self) -> usize {
        self.k.len()
    }

    pub fn total(&self) -> usize {
        self.k.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.k
    }

    /// `kL-j1...jk`, e.g. `3L-011`.
    pub fn label(&self) -> String {
        let digits: String = self.k.iter().map(|v| v.to_string()).collect();
        format!("{}L-{}", self.k.len(), digits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `in x out`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>) -> Result<Self> {
        if bias.len() != weights.ncols() {
            return Err(Error::shape(format!(
                "bias has {} entries for {} outputs",
                bias.len(),
                weights.ncols()
            )));
        }
        Ok(Layer { weights, bias })
    }

    pub fn fan_in(&self) -> usize {
        self.weights.nrows()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Layer>,
    /// Spectral-norm budget of the first layer.
    pub r_budget: f64,
}

impl Network {
    pub fn new(layers: Vec<Layer>, r_budget: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::param("a network needs at least one layer"));
        }
        for (l, pair) in layers.windows(2).enumerate() {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(Error::shape(format!(
                    "layer {} emits {} features but layer {} expects {}",
                    l,
                    pair[0].fan_out(),
                    l + 1,
                    pair[1].fan_in()
                )));
            }
        }
        if layers.last().map(Layer::fan_out) != Some(1) {
            return Err(Error::shape("final layer must have a single output"));
        }
        Ok(Network { layers, r_budget })
    }

    /// Weights and biases drawn uniformly from `±1/sqrt(fan_in)`.
    /// `dims = [d, h_1, ..., 1]`.
    pub fn init_uniform<R: Rng + ?Sized>(dims: &[usize], r_budget: f64, rng: &mut R) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::param("dims needs an input and an output size"));
        }
        let layers = dims
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                let weights = Array2::from_shape_fn((w[0], w[1]), |_| rng.random_range(-bound..=bound));
                let bias = Array1::from_shape_fn(w[1], |_| rng.random_range(-bound..=bound));
                Layer { weights, bias }
            })
            .collect();
        Network::new(layers, r_budget)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(Layer::fan_out)).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Serializes to the text checkpoint format:
    ///
    /// ```text
    /// xcsbm-network 1
    /// depth <L>
    /// r <R>
    /// layer <l> <in> <out>
    /// w <out values of row 0>
    /// ...                      (one `w` line per input row)
    /// b <out values>
    /// ```
    ///
    /// Floats use Rust's shortest round-trip formatting, so save/load is exact.
    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "xcsbm-network 1");
        let _ = writeln!(out, "depth {}", self.depth());
        let _ = writeln!(out, "r {}", self.r_budget);
        for (l, layer) in self.layers.iter().enumerate() {
            let _ = writeln!(out, "layer {} {} {}", l, layer.fan_in(), layer.fan_out());
            for row in layer.weights.rows() {
                let _ = writeln!(out, "w {}", join(row));
            }
            let _ = writeln!(out, "b {}", join(layer.bias.view()));
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of checkpoint, expected {what}")))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.first() != Some(&what) {
                return Err(parse_err(no + 1, format!("expected '{what}' record")));
            }
            Ok((no + 1, fields))
        };
        let (no, header) = next("xcsbm-network")?;
        if header.get(1) != Some(&"1") {
            return Err(parse_err(no, "unsupported checkpoint version"));
        }
        let (no, depth) = next("depth")?;
        let depth: usize = field(&depth, 1, no)?;
        let (no, r) = next("r")?;
        let r_budget: f64 = field(&r, 1, no)?;
        let mut layers = Vec::with_capacity(depth);
        for l in 0..depth {
            let (no, head) = next("layer")?;
            let idx: usize = field(&head, 1, no)?;
            if idx != l {
                return Err(parse_err(no, format!("expected layer {l}, found {idx}")));
            }
            let fan_in: usize = field(&head, 2, no)?;
            let fan_out: usize = field(&head, 3, no)?;
            let mut weights = Array2::zeros((fan_in, fan_out));
            for i in 0..fan_in {
                let (no, row) = next("w")?;
                let vals = floats(&row[1..], fan_out, no)?;
                weights.row_mut(i).assign(&Array1::from(vals));
            }
            let (no, b) = next("b")?;
            let bias = Array1::from(floats(&b[1..], fan_out, no)?);
            layers.push(Layer { weights, bias });
        }
        Network::new(layers, r_budget)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_checkpoint()).map_err(|e| Error::io(path.as_ref(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Network::from_checkpoint(&text)
    }
}

fn join(v: ArrayView1<f64>) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: "<checkpoint>".into(), line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(fields: &[&str], i: usize, line: usize) -> Result<T> {
    fields
        .get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(line, format!("bad or missing field {i}")))
}

fn floats(fields: &[&str], expect: usize, line: usize) -> Result<Vec<f64>> {
    if fields.len() != expect {
        return Err(parse_err(line, format!("expected {expect} values, found {}", fields.len())));
    }
    fields
        .iter()
        .map(|s| s.parse::<f64>().map_err(|e| parse_err(line, e.to_string())))
        .collect()
}

/// Orientation multiplier for an ansatz carrying `convs` convolutions:
/// `sgn(p - q)^convs`, with `sgn(0) = +1`.
pub fn ansatz_sign(p: f64, q: f64, convs: usize) -> f64 {
    if q > p && convs % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// The explicit networks realizing the Bayes rule.
///
/// Depth 2: `W1 = R [mu^, -mu^, nu^, -nu^]`, `W2 = xi [-1, -1, 1, 1]^T`.
/// Depth 3: same `W1`, `W2` with columns `[-1,-1,1,1]` and `[1,1,-1,-1]`,
/// `W3 = xi [1, -1]^T`. All biases zero.
///
/// `xi` multiplies the final layer. On the first layer it would cancel,
/// because `W1` already contains both signs of each direction.
pub fn build_ansatz(depth: usize, r: f64, mu: &[f64], nu: &[f64], xi: f64) -> Result<Network> {
    if !(depth == 2 || depth == 3) {
        return Err(Error::param(format!("ansatz depth must be 2 or 3, got {depth}")));
    }
    if !(r > 0.0) {
        return Err(Error::param(format!("R must be positive, got {r}")));
    }
    if xi != 1.0 && xi != -1.0 {
        return Err(Error::param(format!("xi must be +1 or -1, got {xi}")));
    }
    if mu.len() != nu.len() || mu.is_empty() {
        return Err(Error::shape("mu and nu must have the same positive length"));
    }
    let (nm, nn) = (norm(mu), norm(nu));
    if nm == 0.0 || nn == 0.0 {
        return Err(Error::param("ansatz needs nonzero means"));
    }
    let d = mu.len();
    let mut w1 = Array2::zeros((d, 4));
    for k in 0..d {
        let (a, b) = (mu[k] / nm, nu[k] / nn);
        w1[[k, 0]] = r * a;
        w1[[k, 1]] = -r * a;
        w1[[k, 2]] = r * b;
        w1[[k, 3]] = -r * b;
    }
    let signs = [-1.0, -1.0, 1.0, 1.0];
    let mut layers = vec![Layer { weights: w1, bias: Array1::zeros(4) }];
    if depth == 2 {
        let w2 = Array2::from_shape_fn((4, 1), |(i, _)| xi * signs[i]);
        layers.push(Layer { weights: w2, bias: Array1::zeros(1) });
    } else {
        let w2 = Array2::from_shape_fn((4, 2), |(i, j)| if j == 0 { signs[i] } else { -signs[i] });
        let w3 = Array2::from_shape_vec((2, 1), vec![xi, -xi]).expect("2x1");
        layers.push(Layer { weights: w2, bias: Array1::zeros(2) });
        layers.push(Layer { weights: w3, bias: Array1::zeros(1) });
    }
    Network::new(layers, r)
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    /// `M^{k_l} H^{(l-1)}` (after dropout, if any) per layer.
    pub conv_inputs: Vec<Array2<f64>>,
    /// Pre-activations `f^{(l)}` per layer.
    pub pre: Vec<Array2<f64>>,
}

impl Trace {
    pub fn logits(&self) -> Array1<f64> {
        self.pre.last().expect("nonempty").column(0).to_owned()
    }
}

pub(crate) fn check_plan(net: &Network, op: Option<&ConvOperator>, x: ArrayView2<f64>, plan: &PlacementPlan) -> Result<()> {
    if plan.depth() != net.depth() {
        return Err(Error::shape(format!(
            "plan has {} entries for a {}-layer network",
            plan.depth(),
            net.depth()
        )));
    }
    if x.ncols() != net.input_dim() {
        return Err(Error::shape(format!(
            "input has {} features, network expects {}",
            x.ncols(),
            net.input_dim()
        )));
    }
    match op {
        None if plan.total() > 0 => Err(Error::param(format!(
            "plan {} needs a graph operator",
            plan.label()
        ))),
        Some(op) if op.n() != x.nrows() => Err(Error::shape(format!(
            "operator has {} nodes, input has {} rows",
            op.n(),
            x.nrows()
        ))),
        _ => Ok(()),
    }
}

/// `masks[l]` (for `l >= 1`) multiplies `H^{(l-1)}` elementwise before the
/// convolution of layer `l`; `masks[0]` is ignored.
pub(crate) fn forward_trace(
    net: &Network,
    op: Option<&ConvOperator>,
    x: ArrayView2<f64>,
    plan: &PlacementPlan,
    masks: Option<&[Array2<f64>]>,
) -> Result<Trace> {
    check_plan(net, op, x, plan)?;
    let mut conv_inputs = Vec::with_capacity(net.depth());
    let mut pre: Vec<Array2<f64>> = Vec::with_capacity(net.depth());
    for (l, layer) in net.layers.iter().enumerate() {
        let mut h = match pre.last() {
            None => x.to_owned(),
            Some(z) => z.mapv(relu),
        };
        if let (Some(masks), true) = (masks, l > 0) {
            h *= &masks[l];
        }
        let k = plan.counts()[l];
        let c = match op {
            Some(op) if k > 0 => convolve(op, h.view(), k)?,
            _ => h,
        };
        let z = c.dot(&layer.weights) + layer.bias.view().insert_axis(Axis(0));
        conv_inputs.push(c);
        pre.push(z);
    }
    Ok(Trace { conv_inputs, pre })
}

/// Raw logits `f^{(L)}(X)`. Without an operator every `k_l` must be zero
/// (the `A = I` case).
pub fn forward(net: &Network, op: Option<&ConvOperator>, x: ArrayView2<f64>, plan: &PlacementPlan) -> Result<Array1<f64>> {
    Ok(forward_trace(net, op, x, plan, None)?.logits())
}

pub(crate) fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// `log(1 + e^t)` without overflow.
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{-t})`.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy, `mean_i log(1 + exp((1 - 2 y_i) f_i))`.
///
/// Panics if the lengths differ.
pub fn bce_loss(logits: ArrayView1<f64>, labels: ArrayView1<f64>) -> f64 {
    assert_eq!(logits.len(), labels.len(), "logits and labels differ in length");
    if logits.is_empty() {
        return 0.0;
    }
    let total: f64 = logits.iter().zip(labels).map(|(&f, &y)| softplus((1.0 - 2.0 * y) * f)).sum();
    total / logits.len() as f64
}

const POWER_ITERS: usize = 100;
const POWER_TOL: f64 = 1e-10;

/// Largest singular value by power iteration on `W^T W`.
pub fn spectral_norm(w: ArrayView2<f64>) -> f64 {
    let cols = w.ncols();
    if w.is_empty() {
        return 0.0;
    }
    // fixed, non-symmetric start so no singular direction is orthogonal to it by construction
    let mut v = Array1::from_shape_fn(cols, |i| 1.0 + 0.618_033_988_7 * ((i * 7 + 3) % 11) as f64);
    v /= v.dot(&v).sqrt();
    let mut est = 0.0;
    for _ in 0..POWER_ITERS {
        let wv = w.dot(&v);
        let mut next = w.t().dot(&wv);
        let len = next.dot(&next).sqrt();
        if len == 0.0 {
            return 0.0;
        }
        next /= len;
        let new_est = w.dot(&next).dot(&w.dot(&next)).sqrt();
        v = next;
        let done = (new_est - est).abs() <= POWER_TOL * new_est;
        est = new_est;
        if done {
            break;
        }
    }
    est
}

/// Rescales each weight matrix whose spectral norm exceeds its budget
/// (`r` for the first layer, 1 afterwards) down to the budget.
pub fn project_constraints(net: &Network, r: f64) -> Network {
    let mut out = net.clone();
    project_in_place(&mut out, r);
    out
}

pub(crate) fn project_in_place(net: &mut Network, r: f64) {
    net.r_budget = r;
    for (l, layer) in net.layers.iter_mut().enumerate() {
        let budget = if l == 0 { r } else { 1.0 };
        let s = spectral_norm(layer.weights.view());
        if s > budget {
            layer.weights *= budget / s;
        }
    }
}

/// `h(x) = |<x, nu^>| - |<x, mu^>|` for every row.
pub fn bayes_margin(x: ArrayView2<f64>, mu: &[f64], nu: &[f64]) -> Array1<f64> {
    let mu_hat = Array1::from_iter(mu.iter().map(|v| v / norm(mu)));
    let nu_hat = Array1::from_iter(nu.iter().map(|v| v / norm(nu)));
    let a = x.dot(&mu_hat);
    let b = x.dot(&nu_hat);
    Array1::from_shape_fn(x.nrows(), |i| b[i].abs() - a[i].abs())
}

/// Closed-form ansatz outputs with the convolutions placed after the first layer.
///
/// * one convolution: `(R sgn(p-q) / deg(i)) sum_j a_ij h(X_j)`
/// * two convolutions: `(R / deg(i)) sum_j tau_ij h(X_j)`,
///   `tau_ij = sum_k a_ik a_jk / deg(k)`
///
/// Evaluated directly from the adjacency lists, independently of
/// [`ConvOperator`].
#[allow(clippy::too_many_arguments)]
pub fn closed_form_logits(
    x: ArrayView2<f64>,
    g: &Graph,
    total_convs: usize,
    r: f64,
    p: f64,
    q: f64,
    mu: &[f64],
    nu: &[f64],
) -> Result<Array1<f64>> {
    if g.n() != x.nrows() {
        return Err(Error::shape(format!("graph has {} nodes, input {} rows", g.n(), x.nrows())));
    }
    let h = bayes_margin(x, mu, nu);
    let n = g.n();
    match total_convs {
        1 => {
            let s = ansatz_sign(p, q, 1);
            Ok(Array1::from_shape_fn(n, |i| {
                let sum: f64 = g.neighbors(i).iter().map(|&j| h[j]).sum();
                r * s * sum / g.degree(i) as f64
            }))
        }
        2 => {
            // sum_j tau_ij h_j = sum_{k in N_i} (1/deg k) sum_{j in N_k} h_j
            let inner: Vec<f64> = (0..n)
                .map(|k| g.neighbors(k).iter().map(|&j| h[j]).sum::<f64>() / g.degree(k) as f64)
                .collect();
            Ok(Array1::from_shape_fn(n, |i| {
                let sum: f64 = g.neighbors(i).iter().map(|&k| inner[k]).sum();
                r * sum / g.degree(i) as f64
            }))
        }
        other => Err(Error::param(format!("closed form exists for 1 or 2 convolutions, got {other}"))),
    }
}

/// `max_i |a_i - b_i| / max_i |a_i|`.
pub fn max_relative_diff(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
