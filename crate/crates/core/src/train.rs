//! Reverse-mode gradients, full-batch optimizers and single-trial training.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphops::{convolve_transpose, normalize, ConvOperator, NormMode};
use crate::network::{bce_loss, forward_trace, project_in_place, sigmoid, Network, PlacementPlan};
use crate::rng::{stream_rng, Stream};
use crate::synthdata::{Dataset, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    #[default]
    Adam,
    Sgd,
}

/// Hyperparameters of one training run. The ReLU subgradient at 0 is fixed to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub optimizer: Optimizer,
    /// Project onto the spectral-norm constraint set after every step.
    pub project: bool,
    /// First-layer budget used when `project` is on.
    pub r_budget: f64,
    /// Drop probability for hidden activations; 0 disables.
    pub dropout: f64,
    pub train_fraction: f64,
    /// Hidden width of every hidden layer of freshly initialized networks.
    pub hidden: usize,
    pub norm: NormMode,
    /// Keep the per-epoch training loss in [`TrialResult::history`].
    pub record_history: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            lr: 1e-3,
            weight_decay: 1e-5,
            optimizer: Optimizer::Adam,
            project: false,
            r_budget: 1.0,
            dropout: 0.0,
            train_fraction: 0.5,
            hidden: 16,
            norm: NormMode::Row,
            record_history: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("learning rate must be > 0, got {}", self.lr)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train fraction must lie in (0, 1), got {}", self.train_fraction)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout must lie in [0, 1), got {}", self.dropout)));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::Config(format!("weight decay must be >= 0, got {}", self.weight_decay)));
        }
        if self.hidden == 0 {
            return Err(Error::Config("hidden width must be positive".into()));
        }
        if self.project && !(self.r_budget > 0.0) {
            return Err(Error::Config(format!("projection needs r_budget > 0, got {}", self.r_budget)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub arch: String,
    pub config: TrainConfig,
    pub train_acc: f64,
    pub test_acc: f64,
    pub train_loss: f64,
    pub test_loss: f64,
    pub epochs_run: usize,
    pub history: Vec<f64>,
}

/// One gradient (or moment) tensor per parameter, in layer order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            weights: net.layers.iter().map(|l| Array2::zeros(l.weights.raw_dim())).collect(),
            biases: net.layers.iter().map(|l| Array1::zeros(l.bias.raw_dim())).collect(),
        }
    }

    /// All entries, weights before biases within each layer.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.flatten().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Gradient of the mean BCE over all nodes.
pub fn backward(
    net: &Network,
    op: Option<&ConvOperator>,
    x: ArrayView2<f64>,
    plan: &PlacementPlan,
    labels: ArrayView1<f64>,
) -> Result<Gradients> {
    let nodes: Vec<usize> = (0..x.nrows()).collect();
    backward_on(net, op, x, plan, labels, &nodes)
}

/// Gradient of the mean BCE over `nodes`. Convolutions still mix every row.
pub fn backward_on(
    net: &Network,
    op: Option<&ConvOperator>,
    x: ArrayView2<f64>,
    plan: &PlacementPlan,
    labels: ArrayView1<f64>,
    nodes: &[usize],
) -> Result<Gradients> {
    Ok(backward_inner(net, op, x, plan, labels, nodes, None)?.0)
}

/// Returns the gradients and the loss of the pass they were taken from.
fn backward_inner(
    net: &Network,
    op: Option<&ConvOperator>,
    x: ArrayView2<f64>,
    plan: &PlacementPlan,
    labels: ArrayView1<f64>,
    nodes: &[usize],
    masks: Option<&[Array2<f64>]>,
) -> Result<(Gradients, f64)> {
    if labels.len() != x.nrows() {
        return Err(Error::shape(format!("{} labels for {} rows", labels.len(), x.nrows())));
    }
    if nodes.is_empty() {
        return Err(Error::param("gradient needs at least one node"));
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i >= x.nrows()) {
        return Err(Error::Index { index: bad, len: x.nrows() });
    }
    let trace = forward_trace(net, op, x, plan, masks)?;
    let logits = trace.logits();
    let scale = 1.0 / nodes.len() as f64;
    let mut delta = Array2::zeros((x.nrows(), 1));
    let mut loss = 0.0;
    for &i in nodes {
        delta[[i, 0]] += (sigmoid(logits[i]) - labels[i]) * scale;
        loss += crate::network::softplus((1.0 - 2.0 * labels[i]) * logits[i]) * scale;
    }
    let mut grads = Gradients::zeros_like(net);
    for l in (0..net.depth()).rev() {
        grads.weights[l] = trace.conv_inputs[l].t().dot(&delta);
        grads.biases[l] = delta.sum_axis(Axis(0));
        if l == 0 {
            break;
        }
        let d_conv = delta.dot(&net.layers[l].weights.t());
        let k = plan.counts()[l];
        let mut d_h = match op {
            Some(op) if k > 0 => convolve_transpose(op, d_conv.view(), k)?,
            _ => d_conv,
        };
        if let Some(masks) = masks {
            d_h *= &masks[l];
        }
        // subgradient of ReLU at 0 is 0
        d_h.zip_mut_with(&trace.pre[l - 1], |g, &z| {
            if z <= 0.0 {
                *g = 0.0
            }
        });
        delta = d_h;
    }
    Ok((grads, loss))
}

/// Outcome of a central-difference gradient comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// `max_i |analytic_i - numeric_i| / max_i |analytic_i|`.
    pub max_rel_error: f64,
    /// Smallest `|pre-activation|` over hidden units.
    pub kink_distance: f64,
    pub parameters: usize,
}

/// Compares [`backward`] with central differences of step `h` on every parameter.
pub fn gradient_check(
    net: &Network,
    op: Option<&ConvOperator>,
    x: ArrayView2<f64>,
    plan: &PlacementPlan,
    labels: ArrayView1<f64>,
    h: f64,
) -> Result<GradCheck> {
    let analytic = backward(net, op, x, plan, labels)?.flatten();
    let trace = forward_trace(net, op, x, plan, None)?;
    let kink_distance = trace.pre[..net.depth() - 1]
        .iter()
        .flat_map(|z| z.iter())
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let loss_at = |probe: &Network| -> Result<f64> {
        let f = crate::network::forward(probe, op, x, plan)?;
        Ok(bce_loss(f.view(), labels))
    };
    let mut numeric = Vec::with_capacity(analytic.len());
    let mut probe = net.clone();
    for l in 0..net.depth() {
        for idx in 0..net.layers[l].weights.len() {
            let (r, c) = (idx / net.layers[l].fan_out(), idx % net.layers[l].fan_out());
            let orig = probe.layers[l].weights[[r, c]];
            probe.layers[l].weights[[r, c]] = orig + h;
            let up = loss_at(&probe)?;
            probe.layers[l].weights[[r, c]] = orig - h;
            let down = loss_at(&probe)?;
            probe.layers[l].weights[[r, c]] = orig;
            numeric.push((up - down) / (2.0 * h));
        }
        for c in 0..net.layers[l].bias.len() {
            let orig = probe.layers[l].bias[c];
            probe.layers[l].bias[c] = orig + h;
            let up = loss_at(&probe)?;
            probe.layers[l].bias[c] = orig - h;
            let down = loss_at(&probe)?;
            probe.layers[l].bias[c] = orig;
            numeric.push((up - down) / (2.0 * h));
        }
    }
    let scale = analytic.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = analytic.iter().zip(&numeric).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let max_rel_error = if scale > 0.0 { diff / scale } else { diff };
    Ok(GradCheck { max_rel_error, kink_distance, parameters: analytic.len() })
}

struct Adam {
    m: Gradients,
    v: Gradients,
    t: i32,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(net: &Network) -> Self {
        Adam { m: Gradients::zeros_like(net), v: Gradients::zeros_like(net), t: 0 }
    }

    fn step(&mut self, net: &mut Network, g: &Gradients, lr: f64, wd: f64) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            let g = g + wd * *p;
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        };
        for (l, layer) in net.layers.iter_mut().enumerate() {
            ndarray::Zip::from(&mut layer.weights)
                .and(&g.weights[l])
                .and(&mut self.m.weights[l])
                .and(&mut self.v.weights[l])
                .for_each(|p, &g, m, v| update(p, g, m, v));
            ndarray::Zip::from(&mut layer.bias)
                .and(&g.biases[l])
                .and(&mut self.m.biases[l])
                .and(&mut self.v.biases[l])
                .for_each(|p, &g, m, v| update(p, g, m, v));
        }
    }
}

fn sgd_step(net: &mut Network, g: &Gradients, lr: f64, wd: f64) {
    for (l, layer) in net.layers.iter_mut().enumerate() {
        layer.weights.zip_mut_with(&g.weights[l], |p, &g| *p -= lr * (g + wd * *p));
        layer.bias.zip_mut_with(&g.biases[l], |p, &g| *p -= lr * (g + wd * *p));
    }
}

/// Seeded transductive split: `(train, test)` node indices, both sorted and nonempty.
pub fn split_nodes(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::param(format!("cannot split {n} nodes")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, Stream::Split));
    let cut = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let mut train = idx[..cut].to_vec();
    let mut test = idx[cut..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Fresh network for `plan` with `cfg.hidden`-wide hidden layers, drawn from the `Init` stream.
pub fn init_network(d: usize, plan: &PlacementPlan, cfg: &TrainConfig, seed: u64) -> Result<Network> {
    if plan.depth() == 0 {
        return Err(Error::param("plan must have at least one layer"));
    }
    let mut dims = vec![d];
    dims.extend(std::iter::repeat_n(cfg.hidden, plan.depth() - 1));
    dims.push(1);
    Network::init_uniform(&dims, cfg.r_budget, &mut stream_rng(seed, Stream::Init))
}

fn operator_for(g: Option<&Graph>, plan: &PlacementPlan, mode: NormMode) -> Result<Option<ConvOperator>> {
    match g {
        Some(g) if plan.total() > 0 => Ok(Some(normalize(g, mode)?)),
        _ => Ok(None),
    }
}

fn dropout_masks<R: Rng>(net: &Network, n: usize, p: f64, rng: &mut R) -> Vec<Array2<f64>> {
    let keep = 1.0 / (1.0 - p);
    net.layers
        .iter()
        .enumerate()
        .map(|(l, layer)| {
            if l == 0 {
                Array2::zeros((0, 0))
            } else {
                Array2::from_shape_fn((n, layer.fan_in()), |_| if rng.random::<f64>() < p { 0.0 } else { keep })
            }
        })
        .collect()
}

fn check_graph(ds: &Dataset, g: Option<&Graph>) -> Result<()> {
    match g {
        Some(g) if g.n() != ds.n() => Err(Error::shape(format!("graph has {} nodes, dataset {}", g.n(), ds.n()))),
        _ => Ok(()),
    }
}

/// Full-batch optimization of the mean loss over `nodes`; returns the per-epoch
/// loss when `cfg.record_history` is set.
fn fit(
    net: &mut Network,
    op: Option<&ConvOperator>,
    ds: &Dataset,
    plan: &PlacementPlan,
    nodes: &[usize],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let labels = ds.labels_f64();
    if cfg.project {
        project_in_place(net, cfg.r_budget);
    }
    let mut adam = Adam::new(net);
    let mut drop_rng = stream_rng(seed, Stream::Dropout);
    let mut history = Vec::new();
    for epoch in 0..cfg.epochs {
        let masks = (cfg.dropout > 0.0).then(|| dropout_masks(net, ds.n(), cfg.dropout, &mut drop_rng));
        let (grads, loss) = backward_inner(net, op, ds.x.view(), plan, labels.view(), nodes, masks.as_deref())?;
        if !loss.is_finite() {
            return Err(Error::Diverged(epoch));
        }
        if cfg.record_history {
            history.push(loss);
        }
        match cfg.optimizer {
            Optimizer::Adam => adam.step(net, &grads, cfg.lr, cfg.weight_decay),
            Optimizer::Sgd => sgd_step(net, &grads, cfg.lr, cfg.weight_decay),
        }
        if cfg.project {
            project_in_place(net, cfg.r_budget);
        }
    }
    Ok(history)
}

fn finish(net: Network, plan: &PlacementPlan, cfg: &TrainConfig, seed: u64, train: (f64, f64), test: (f64, f64), history: Vec<f64>) -> Result<(Network, TrialResult)> {
    if !(train.1.is_finite() && test.1.is_finite()) {
        return Err(Error::Diverged(cfg.epochs));
    }
    let result = TrialResult {
        seed,
        arch: plan.label(),
        config: cfg.clone(),
        train_acc: train.0,
        test_acc: test.0,
        train_loss: train.1,
        test_loss: test.1,
        epochs_run: cfg.epochs,
        history,
    };
    Ok((net, result))
}

/// Full-batch training on the train split, with convolutions over every node.
/// Deterministic in `seed`.
pub fn train(
    net: &Network,
    ds: &Dataset,
    g: Option<&Graph>,
    plan: &PlacementPlan,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(Network, TrialResult)> {
    cfg.validate()?;
    check_graph(ds, g)?;
    let op = operator_for(g, plan, cfg.norm)?;
    let (train_nodes, test_nodes) = split_nodes(ds.n(), cfg.train_fraction, seed)?;
    let mut net = net.clone();
    let history = fit(&mut net, op.as_ref(), ds, plan, &train_nodes, cfg, seed)?;
    let logits = crate::network::forward(&net, op.as_ref(), ds.x.view(), plan)?;
    let labels = ds.labels_f64();
    let train_score = score(logits.view(), labels.view(), &train_nodes)?;
    let test_score = score(logits.view(), labels.view(), &test_nodes)?;
    finish(net, plan, cfg, seed, train_score, test_score, history)
}

/// Trains on every node of one instance and tests on every node of another.
/// `cfg.train_fraction` is unused.
#[allow(clippy::too_many_arguments)]
pub fn train_inductive(
    net: &Network,
    train_set: (&Dataset, Option<&Graph>),
    test_set: (&Dataset, Option<&Graph>),
    plan: &PlacementPlan,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(Network, TrialResult)> {
    cfg.validate()?;
    let (ds, g) = train_set;
    let (test_ds, test_g) = test_set;
    check_graph(ds, g)?;
    check_graph(test_ds, test_g)?;
    let op = operator_for(g, plan, cfg.norm)?;
    let all: Vec<usize> = (0..ds.n()).collect();
    let mut net = net.clone();
    let history = fit(&mut net, op.as_ref(), ds, plan, &all, cfg, seed)?;
    let logits = crate::network::forward(&net, op.as_ref(), ds.x.view(), plan)?;
    let train_score = score(logits.view(), ds.labels_f64().view(), &all)?;
    let test_op = operator_for(test_g, plan, cfg.norm)?;
    let test_logits = crate::network::forward(&net, test_op.as_ref(), test_ds.x.view(), plan)?;
    let test_all: Vec<usize> = (0..test_ds.n()).collect();
    let test_score = score(test_logits.view(), test_ds.labels_f64().view(), &test_all)?;
    finish(net, plan, cfg, seed, train_score, test_score, history)
}

/// `(accuracy, loss)` on `subset`. A logit of exactly 0 predicts class 0.
pub fn evaluate(net: &Network, ds: &Dataset, g: Option<&Graph>, plan: &PlacementPlan, subset: &[usize]) -> Result<(f64, f64)> {
    let op = operator_for(g, plan, NormMode::Row)?;
    let logits = crate::network::forward(net, op.as_ref(), ds.x.view(), plan)?;
    score(logits.view(), ds.labels_f64().view(), subset)
}

/// Accuracy and mean BCE of precomputed logits on `subset`.
pub fn score(logits: ArrayView1<f64>, labels: ArrayView1<f64>, subset: &[usize]) -> Result<(f64, f64)> {
    if subset.is_empty() {
        return Err(Error::param("evaluation subset is empty"));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= logits.len()) {
        return Err(Error::Index { index: bad, len: logits.len() });
    }
    let f = Array1::from_iter(subset.iter().map(|&i| logits[i]));
    let y = Array1::from_iter(subset.iter().map(|&i| labels[i]));
    let correct = f.iter().zip(&y).filter(|(&f, &y)| (f > 0.0) == (y > 0.5)).count();
    Ok((correct as f64 / subset.len() as f64, bce_loss(f.view(), y.view())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_ansatz, forward, spectral_norm, Layer};
    use crate::synthdata::{sample_xor_csbm, sample_xor_gmm, CsbmParams};
    use crate::theory::misclassification_floor;
    use ndarray::array;
    use rand_distr::{Distribution, StandardNormal};

    fn random_instance(n: usize, seed: u64) -> (Dataset, Graph) {
        let params = CsbmParams::with_separation(n, 4, 2.0, 0.5, 0.4, 0.1).unwrap();
        sample_xor_csbm(&params, seed).unwrap()
    }

    fn all_plans(depth: usize) -> Vec<PlacementPlan> {
        let mut plans = vec![vec![]];
        for _ in 0..depth {
            plans = plans
                .into_iter()
                .flat_map(|p: Vec<usize>| (0..3).map(move |k| [p.clone(), vec![k]].concat()))
                .collect();
        }
        plans.into_iter().map(PlacementPlan::new).collect()
    }

    #[test]
    fn gradients_match_finite_differences_for_every_plan() {
        let (ds, g) = random_instance(24, 1);
        let op = normalize(&g, NormMode::Row).unwrap();
        let labels = ds.labels_f64();
        let cfg = TrainConfig { hidden: 5, ..TrainConfig::default() };
        for depth in 1..=3 {
            for plan in all_plans(depth) {
                let mut seed = 0;
                let check = loop {
                    let net = init_network(4, &plan, &cfg, seed).unwrap();
                    let c = gradient_check(&net, Some(&op), ds.x.view(), &plan, labels.view(), 1e-6).unwrap();
                    if c.kink_distance > 1e-4 {
                        break c;
                    }
                    seed += 1;
                };
                assert!(check.max_rel_error <= 1e-5, "{}: {:?}", plan.label(), check);
            }
        }
    }

    #[test]
    fn symmetric_operator_gradients() {
        let (ds, g) = random_instance(20, 2);
        let op = normalize(&g, NormMode::Symmetric).unwrap();
        let plan = PlacementPlan::new(vec![1, 2]);
        let net = init_network(4, &plan, &TrainConfig { hidden: 4, ..Default::default() }, 7).unwrap();
        let c = gradient_check(&net, Some(&op), ds.x.view(), &plan, ds.labels_f64().view(), 1e-6).unwrap();
        assert!(c.max_rel_error <= 1e-5, "{c:?}");
    }

    #[test]
    fn zero_network_bias_gradient() {
        let layers = vec![
            Layer::new(Array2::zeros((3, 4)), Array1::zeros(4)).unwrap(),
            Layer::new(Array2::zeros((4, 1)), Array1::zeros(1)).unwrap(),
        ];
        let net = Network::new(layers, 1.0).unwrap();
        let x = array![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]];
        let y = array![0.0, 0.0, 1.0, 0.0];
        let g = backward(&net, None, x.view(), &PlacementPlan::mlp(2), y.view()).unwrap();
        let expect = y.mapv(|v| 0.5 - v).mean().unwrap();
        assert!((g.biases[1][0] - expect).abs() < 1e-15);
    }

    #[test]
    fn saturated_gradient_vanishes() {
        let layers = vec![Layer::new(array![[50.0]], array![0.0]).unwrap()];
        let net = Network::new(layers, 1.0).unwrap();
        let x = array![[1.0], [-1.0]];
        let y = array![1.0, 0.0];
        let g = backward(&net, None, x.view(), &PlacementPlan::mlp(1), y.view()).unwrap();
        assert!(g.norm() <= 1e-10);
    }

    #[test]
    fn backward_rejects_bad_shapes() {
        let net = build_ansatz(2, 1.0, &[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
        let x = Array2::<f64>::zeros((3, 2));
        assert!(backward(&net, None, x.view(), &PlacementPlan::mlp(2), array![0.0, 1.0].view()).is_err());
        assert!(backward(&net, None, x.view(), &PlacementPlan::mlp(3), array![0.0, 1.0, 0.0].view()).is_err());
    }

    #[test]
    fn separable_data_is_learned() {
        let params = CsbmParams::with_separation(200, 4, 6.0, 0.0, 0.5, 0.5).unwrap();
        let ds = sample_xor_gmm(&params, 3).unwrap();
        let plan = PlacementPlan::mlp(2);
        let cfg = TrainConfig { epochs: 200, lr: 0.05, ..Default::default() };
        let net = init_network(4, &plan, &cfg, 3).unwrap();
        let (_, res) = train(&net, &ds, None, &plan, &cfg, 3).unwrap();
        assert_eq!(res.test_acc, 1.0);
    }

    #[test]
    fn cannot_beat_the_floor() {
        let floor = misclassification_floor(1.0).unwrap();
        let cfg = TrainConfig { epochs: 100, lr: 0.01, ..Default::default() };
        let plan = PlacementPlan::mlp(2);
        let mut total = 0.0;
        for t in 0..20 {
            let params = CsbmParams::with_separation(400, 4, 0.5, 0.5, 0.5, 0.5).unwrap();
            let ds = sample_xor_gmm(&params, 100 + t).unwrap();
            let net = init_network(4, &plan, &cfg, t).unwrap();
            total += train(&net, &ds, None, &plan, &cfg, t).unwrap().1.test_acc;
        }
        assert!(total / 20.0 <= 1.0 - floor + 0.05);
    }

    #[test]
    fn training_is_deterministic() {
        let (ds, g) = random_instance(80, 4);
        let plan = PlacementPlan::new(vec![0, 1]);
        let cfg = TrainConfig { epochs: 30, dropout: 0.3, record_history: true, ..Default::default() };
        let net = init_network(4, &plan, &cfg, 9).unwrap();
        let a = train(&net, &ds, Some(&g), &plan, &cfg, 9).unwrap();
        let b = train(&net, &ds, Some(&g), &plan, &cfg, 9).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.1.history.len(), 30);
    }

    #[test]
    fn projection_holds_every_epoch() {
        let (ds, g) = random_instance(60, 5);
        let plan = PlacementPlan::new(vec![0, 1, 0]);
        let mut cfg = TrainConfig { epochs: 1, lr: 0.5, project: true, r_budget: 0.7, ..Default::default() };
        let mut net = init_network(4, &plan, &cfg, 5).unwrap();
        for epoch in 0..10 {
            cfg.epochs = 1;
            net = train(&net, &ds, Some(&g), &plan, &cfg, epoch).unwrap().0;
            for (l, layer) in net.layers.iter().enumerate() {
                let budget = if l == 0 { 0.7 } else { 1.0 };
                assert!(spectral_norm(layer.weights.view()) <= budget + 1e-9);
            }
        }
    }

    #[test]
    fn sgd_loss_non_increasing_on_separable_data() {
        let params = CsbmParams::with_separation(100, 4, 4.0, 0.0, 0.5, 0.5).unwrap();
        let ds = sample_xor_gmm(&params, 6).unwrap();
        let plan = PlacementPlan::mlp(2);
        let cfg = TrainConfig {
            epochs: 200,
            lr: 1e-3,
            optimizer: Optimizer::Sgd,
            weight_decay: 0.0,
            record_history: true,
            ..Default::default()
        };
        let net = init_network(4, &plan, &cfg, 6).unwrap();
        let h = train(&net, &ds, None, &plan, &cfg, 6).unwrap().1.history;
        assert!(h.windows(21).all(|w| w[20] <= w[0]));
    }

    #[test]
    fn evaluate_examples() {
        let params = CsbmParams::with_separation(100, 3, 2.0, 0.0, 0.5, 0.5).unwrap();
        let ds = sample_xor_gmm(&params, 7).unwrap();
        let net = build_ansatz(2, 1.0, &params.mu, &params.nu, 1.0).unwrap();
        let all: Vec<usize> = (0..100).collect();
        assert_eq!(evaluate(&net, &ds, None, &PlacementPlan::mlp(2), &all).unwrap().0, 1.0);
        let zero = Network::new(
            vec![
                Layer::new(Array2::zeros((3, 2)), Array1::zeros(2)).unwrap(),
                Layer::new(Array2::zeros((2, 1)), Array1::zeros(1)).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        let (_, loss) = evaluate(&zero, &ds, None, &PlacementPlan::mlp(2), &all).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(evaluate(&zero, &ds, None, &PlacementPlan::mlp(2), &[]).is_err());
    }

    #[test]
    fn random_logits_are_near_chance() {
        let params = CsbmParams::with_separation(400, 2, 1.0, 1.0, 0.5, 0.5).unwrap();
        let ds = sample_xor_gmm(&params, 8).unwrap();
        let mut rng = stream_rng(8, Stream::MonteCarlo);
        let logits = Array1::from_shape_fn(400, |_| StandardNormal.sample(&mut rng));
        let all: Vec<usize> = (0..400).collect();
        let (acc, _) = score(logits.view(), ds.labels_f64().view(), &all).unwrap();
        assert!((acc - 0.5).abs() <= 0.1);
    }

    #[test]
    fn zero_logit_predicts_class_zero() {
        let (acc, _) = score(array![0.0, 0.0].view(), array![0.0, 1.0].view(), &[0, 1]).unwrap();
        assert_eq!(acc, 0.5);
        let (acc, _) = score(array![0.0].view(), array![0.0].view(), &[0]).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn inductive_training_scores_the_second_instance() {
        let (a, ga) = random_instance(80, 11);
        let (b, gb) = random_instance(60, 12);
        let plan = PlacementPlan::new(vec![0, 1]);
        let cfg = TrainConfig { epochs: 20, ..Default::default() };
        let net = init_network(4, &plan, &cfg, 1).unwrap();
        let (trained, res) = train_inductive(&net, (&a, Some(&ga)), (&b, Some(&gb)), &plan, &cfg, 1).unwrap();
        let all: Vec<usize> = (0..60).collect();
        assert_eq!(evaluate(&trained, &b, Some(&gb), &plan, &all).unwrap(), (res.test_acc, res.test_loss));
        assert!(train_inductive(&net, (&a, Some(&gb)), (&b, Some(&gb)), &plan, &cfg, 1).is_err());
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let (a, b) = split_nodes(101, 0.5, 3).unwrap();
        assert_eq!(a.len() + b.len(), 101);
        assert!(a.iter().all(|i| b.binary_search(i).is_err()));
        assert_eq!(split_nodes(101, 0.5, 3).unwrap(), (a, b));
        assert!(split_nodes(1, 0.5, 3).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig { lr: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { train_fraction: 1.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { dropout: 1.0, ..Default::default() }.validate().is_err());
        let json = serde_json::to_string(&TrainConfig::default()).unwrap();
        assert_eq!(serde_json::from_str::<TrainConfig>(&json).unwrap(), TrainConfig::default());
        assert_eq!(serde_json::from_str::<TrainConfig>("{}").unwrap(), TrainConfig::default());
    }

    #[test]
    fn ansatz_trained_with_projection_keeps_forward_consistent() {
        let (ds, g) = random_instance(50, 10);
        let plan = PlacementPlan::new(vec![0, 1]);
        let cfg = TrainConfig { epochs: 5, project: true, r_budget: 2.0, ..Default::default() };
        let net = build_ansatz(2, 1.0, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1.0).unwrap();
        let (trained, res) = train(&net, &ds, Some(&g), &plan, &cfg, 1).unwrap();
        let op = normalize(&g, NormMode::Row).unwrap();
        let f = forward(&trained, Some(&op), ds.x.view(), &plan).unwrap();
        let (train_nodes, _) = split_nodes(50, 0.5, 1).unwrap();
        let (_, loss) = score(f.view(), ds.labels_f64().view(), &train_nodes).unwrap();
        assert!((loss - res.train_loss).abs() < 1e-12);
    }
}
