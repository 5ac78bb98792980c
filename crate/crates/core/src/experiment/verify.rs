use std::fmt;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::config::{KGrid, SweepConfig};
use super::sweep::{crossing_k, mean_curves, run_sweep_rows, CurvePoint, SweepRow};
use crate::error::Result;
use crate::graphops::{
    common_neighbor_concentration_report_with, degree_concentration_report, mean_collapse_ratio, normalize,
    rho_profile, NormMode, PairSampling,
};
use crate::network::{
    ansatz_sign, bce_loss, build_ansatz, closed_form_logits, forward, max_relative_diff, PlacementPlan,
};
use crate::rng::{derive, stream_rng, Stream};
use crate::synthdata::{sample_sbm, sample_xor_csbm, sample_xor_gmm, CsbmParams};
use crate::theory::{bayes_classify, bayes_error_rate, misclassification_floor, zeta};
use crate::train::{gradient_check, init_network, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Soft checks are reported but do not affect [`Report::passed`].
    pub soft: bool,
    pub seconds: f64,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.pass, self.soft) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "WARN",
        };
        write!(f, "{status} {} ({:.1}s): {}", self.name, self.seconds, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scale: Scale,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    /// True iff every hard check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.soft)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass && !c.soft).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Names of the checks each scale runs, in execution order.
pub fn check_names(scale: Scale) -> Vec<&'static str> {
    let mut names = vec![
        "bayes_floor",
        "zeta_oracle",
        "placement_equivalence",
        "closed_form_oracle",
        "loss_formula",
        "variance_reduction",
        "concentration",
        "first_layer_collapse",
        "gradient_checks",
    ];
    if scale == Scale::Full {
        names.push("phase_diagram");
    }
    names.push("runtime_budget");
    names
}

/// Outcome of a single check body: pass flag and a one-line detail.
pub type Outcome = (bool, String);

fn timed(name: &str, f: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(o) => o,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name: name.to_string(), pass, soft: false, seconds: start.elapsed().as_secs_f64(), detail }
}

/// Runs the verification suite. `quick` runs every check at reduced sizes
/// except the phase diagram.
pub fn verify_suite(scale: Scale, seed: u64) -> Report {
    let start = Instant::now();
    let mut checks = Vec::new();
    for name in check_names(scale) {
        let result = match name {
            "bayes_floor" => timed(name, || bayes_floor_check(&misclassification_floor, 20_000, 10, seed)),
            "zeta_oracle" => timed(name, || zeta_check(1_000_000, seed)),
            "placement_equivalence" => timed(name, || placement_check(20, 200, seed)),
            "closed_form_oracle" => timed(name, || closed_form_check(20, 200, seed)),
            "loss_formula" => timed(name, || loss_formula_check(1000, 10, seed)),
            "variance_reduction" => timed(name, || variance_reduction_check(seed)),
            "concentration" => timed(name, || match scale {
                Scale::Quick => concentration_check(1000, 5, seed),
                Scale::Full => concentration_check(5000, 20, seed),
            }),
            "first_layer_collapse" => timed(name, || collapse_check(seed)),
            "gradient_checks" => timed(name, || gradient_suite(scale == Scale::Full, seed)),
            "phase_diagram" => timed(name, || phase_diagram_check(&PhaseSettings::default(), seed)),
            "runtime_budget" => {
                let elapsed = start.elapsed().as_secs_f64();
                let budget = match scale {
                    Scale::Quick => 120.0,
                    Scale::Full => 1800.0,
                };
                CheckResult {
                    name: name.to_string(),
                    pass: elapsed <= budget,
                    soft: true,
                    seconds: 0.0,
                    detail: format!("suite took {elapsed:.1}s, budget {budget:.0}s"),
                }
            }
            other => unreachable!("unknown check {other}"),
        };
        checks.push(result);
    }
    Report { scale, seed, checks }
}

/// Empirical Bayes misclassification at `n`, `d = 2`, `sigma = 1`, `K = 1`
/// must equal `floor(1)` within 0.01 for every seed, in under 10 s.
/// The detail line also reports the exact Bayes error and the frequency of the
/// event `|Z_other| - |Z_own| > K / sqrt2` on the same noise.
pub fn bayes_floor_check(floor: &dyn Fn(f64) -> Result<f64>, n: usize, seeds: u64, seed: u64) -> Result<Outcome> {
    let start = Instant::now();
    let k = 1.0;
    let target = floor(k)?;
    let params = CsbmParams::with_separation(n, 2, k, 1.0, 0.5, 0.5)?;
    let (mu_hat, nu_hat) = ([1.0, 0.0], [0.0, 1.0]);
    let mut errors = Vec::new();
    let mut relaxed = 0usize;
    for s in 0..seeds {
        let ds = sample_xor_gmm(&params, derive(seed, s))?;
        let mut wrong = 0usize;
        for i in 0..n {
            let x = ds.x.row(i);
            let x = [x[0], x[1]];
            if bayes_classify(&x, &params.mu, &params.nu) != ds.eps[i] {
                wrong += 1;
            }
            let sign = 2.0 * ds.eta[i] as f64 - 1.0;
            let mean = if ds.eps[i] == 0 { &params.mu } else { &params.nu };
            let z = [x[0] - sign * mean[0], x[1] - sign * mean[1]];
            let (za, zb) = (z[0] * mu_hat[0] + z[1] * mu_hat[1], z[0] * nu_hat[0] + z[1] * nu_hat[1]);
            // noise along the wrong direction beats noise along the right one by the full margin
            let (own, other) = if ds.eps[i] == 0 { (za, zb) } else { (zb, za) };
            if other.abs() - own.abs() > k / std::f64::consts::SQRT_2 {
                relaxed += 1;
            }
        }
        errors.push(wrong as f64 / n as f64);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let worst = errors.iter().map(|e| (e - target).abs()).fold(0.0, f64::max);
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let pass = worst <= 0.01 && elapsed < 10.0;
    let detail = format!(
        "floor {target:.4}, empirical mean {mean:.4} (max |diff| {worst:.4}), exact Bayes error {:.4}, relaxed-event freq {:.4}, {elapsed:.1}s",
        bayes_error_rate(k)?,
        relaxed as f64 / (n as f64 * seeds as f64),
    );
    Ok((pass, detail))
}

/// Paired Monte Carlo of `E|x + Z| - E|Z|` against `zeta(x, 1)` within 3
/// standard errors, plus the small-argument ratio at `x = 0.01`.
pub fn zeta_check(samples: usize, seed: u64) -> Result<Outcome> {
    let mut rng = stream_rng(seed, Stream::MonteCarlo);
    let z: Vec<f64> = (0..samples).map(|_| rng.sample(StandardNormal)).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [0.1, 0.5, 1.0, 2.0] {
        let diffs: Vec<f64> = z.iter().map(|&v| (x + v).abs() - v.abs()).collect();
        let m = diffs.iter().sum::<f64>() / samples as f64;
        let var = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (samples as f64 - 1.0);
        let se = (var / samples as f64).sqrt();
        let exact = zeta(x, 1.0)?;
        let score = (m - exact).abs() / se;
        pass &= score <= 3.0;
        parts.push(format!("x={x}: {score:.2} se"));
    }
    let ratio = zeta(0.01, 1.0)? * (2.0 * std::f64::consts::PI).sqrt() / 1e-4;
    pass &= (0.95..=1.0).contains(&ratio);
    parts.push(format!("small-x ratio {ratio:.5}"));
    Ok((pass, parts.join(", ")))
}

struct Instance {
    params: CsbmParams,
    ds: crate::synthdata::Dataset,
    g: crate::synthdata::Graph,
}

/// Random XOR-CSBM instances with `d = 4`, `sigma = 1`, `gamma` in `[0.5, 4]`
/// and `p != q` drawn from `[0.02, 0.5]`.
fn random_instances(count: usize, n: usize, seed: u64) -> Result<Vec<Instance>> {
    (0..count as u64)
        .map(|i| {
            let s = derive(seed, 1000 + i);
            let mut rng = stream_rng(s, Stream::MonteCarlo);
            let gamma = rng.random_range(0.5..4.0);
            let p: f64 = rng.random_range(0.02..0.5);
            let mut q: f64 = rng.random_range(0.02..0.5);
            if (p - q).abs() < 1e-3 {
                q = 0.5 - q;
            }
            let params = CsbmParams::with_separation(n, 4, gamma, 1.0, p, q)?;
            let (ds, g) = sample_xor_csbm(&params, s)?;
            Ok(Instance { params, ds, g })
        })
        .collect()
}

fn plans(v: &[&[usize]]) -> Vec<PlacementPlan> {
    v.iter().map(|k| PlacementPlan::new(k.to_vec())).collect()
}

/// Three-layer ansatz logits agree across `(0,1,0)/(0,0,1)` and across
/// `(0,2,0)/(0,1,1)/(0,0,2)` to `1e-10` relative.
pub fn placement_check(count: usize, n: usize, seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for inst in random_instances(count, n, seed)? {
        let op = normalize(&inst.g, NormMode::Row)?;
        let net = build_ansatz(3, 1.0, &inst.params.mu, &inst.params.nu, 1.0)?;
        for group in [plans(&[&[0, 1, 0], &[0, 0, 1]]), plans(&[&[0, 2, 0], &[0, 1, 1], &[0, 0, 2]])] {
            let base = forward(&net, Some(&op), inst.ds.x.view(), &group[0])?;
            for plan in &group[1..] {
                let f = forward(&net, Some(&op), inst.ds.x.view(), plan)?;
                worst = worst.max(max_relative_diff(base.view(), f.view()));
            }
        }
    }
    Ok((worst <= 1e-10, format!("{count} instances, max relative diff {worst:.2e}")))
}

/// `forward` on the ansatz equals `closed_form_logits` for every placement
/// with one or two convolutions after the first layer, at depth 2 and 3.
pub fn closed_form_check(count: usize, n: usize, seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for inst in random_instances(count, n, seed)? {
        let op = normalize(&inst.g, NormMode::Row)?;
        let (p, q) = (inst.params.p, inst.params.q);
        for (total, group) in [
            (1, plans(&[&[0, 1], &[0, 1, 0], &[0, 0, 1]])),
            (2, plans(&[&[0, 2], &[0, 2, 0], &[0, 1, 1], &[0, 0, 2]])),
        ] {
            let expect = closed_form_logits(inst.ds.x.view(), &inst.g, total, 1.0, p, q, &inst.params.mu, &inst.params.nu)?;
            for plan in group {
                let net = build_ansatz(plan.depth(), 1.0, &inst.params.mu, &inst.params.nu, ansatz_sign(p, q, total))?;
                let f = forward(&net, Some(&op), inst.ds.x.view(), &plan)?;
                worst = worst.max(max_relative_diff(expect.view(), f.view()));
            }
        }
    }
    Ok((worst <= 1e-10, format!("{count} instances, max relative diff {worst:.2e}")))
}

/// Ansatz MLP with `R = 1`, `sigma = 1`, `gamma = 8 sqrt(log n)`:
/// `-log(loss) / (R gamma / sqrt2)` must lie in `[0.85, 1.15]` for every seed.
pub fn loss_formula_check(n: usize, seeds: u64, seed: u64) -> Result<Outcome> {
    let (r, sigma) = (1.0, 1.0);
    let gamma = 8.0 * sigma * (n as f64).ln().sqrt();
    let params = CsbmParams::with_separation(n, 2, gamma, sigma, 0.5, 0.5)?;
    let net = build_ansatz(2, r, &params.mu, &params.nu, 1.0)?;
    let mut ratios = Vec::new();
    for s in 0..seeds {
        let ds = sample_xor_gmm(&params, derive(seed, 2000 + s))?;
        let f = forward(&net, None, ds.x.view(), &PlacementPlan::mlp(2))?;
        let loss = bce_loss(f.view(), ds.labels_f64().view());
        ratios.push(-loss.ln() / (r * gamma / std::f64::consts::SQRT_2));
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo >= 0.85 && hi <= 1.15, format!("ratio range [{lo:.3}, {hi:.3}] over {seeds} seeds")))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn sbm(n: usize, p: f64, q: f64, seed: u64) -> Result<(Vec<u8>, crate::synthdata::Graph)> {
    let eps: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let g = sample_sbm(n, p, q, &eps, seed)?;
    Ok((eps, g))
}

/// At `p = 0.2`, `q = 0.1`: median `rho(1)` within 10% of `2 / (n(p+q))` and
/// median `n rho(2)` within 30% of `(2(p^2+q^2)^2 + 8p^2q^2) / (p+q)^4` at
/// `n = 2000`; median `rho(3) / rho(2) <= 3` at `n = 1000` and `n = 2000`.
pub fn variance_reduction_check(seed: u64) -> Result<Outcome> {
    let (p, q) = (0.2, 0.1);
    let nodes_for = |n: usize| -> Vec<usize> { (0..200).map(|i| i * n / 200).collect() };
    let mut ratios = Vec::new();
    let mut rho1_err = 0.0;
    let mut rho2_err = 0.0;
    for (idx, n) in [1000usize, 2000].into_iter().enumerate() {
        let (_, g) = sbm(n, p, q, derive(seed, 3000 + idx as u64))?;
        let nodes = nodes_for(n);
        let r2 = rho_profile(&g, 2, &nodes)?;
        let r3 = rho_profile(&g, 3, &nodes)?;
        ratios.push(median(r3.iter().zip(&r2).map(|(a, b)| a / b).collect()));
        if n == 2000 {
            let nf = n as f64;
            let r1 = median(g.degrees().iter().map(|&d| 1.0 / d as f64).collect());
            rho1_err = (r1 / (2.0 / (nf * (p + q))) - 1.0).abs();
            let expect = (2.0 * (p * p + q * q).powi(2) + 8.0 * p * p * q * q) / (p + q).powi(4);
            rho2_err = (median(r2.iter().map(|v| v * nf).collect()) / expect - 1.0).abs();
        }
    }
    let pass = rho1_err <= 0.10 && rho2_err <= 0.30 && ratios.iter().all(|&r| r <= 3.0);
    Ok((
        pass,
        format!(
            "rho(1) rel err {rho1_err:.3}, n rho(2) rel err {rho2_err:.3}, rho(3)/rho(2) at n=1000,2000: {:.3}, {:.3}",
            ratios[0], ratios[1]
        ),
    ))
}

/// Degree and common-neighbour reports at `p = 0.3`, `q = 0.15`, `c = 1`,
/// which satisfies both density assumptions (`log^2 n / n` and `log n / sqrt n`)
/// for `n >= 1000`. Every sample must pass both reports.
pub fn concentration_check(n: usize, samples: u64, seed: u64) -> Result<Outcome> {
    let (p, q, c) = (0.3, 0.15, 1.0);
    let mut deg_worst: f64 = 0.0;
    let mut cn_worst: f64 = 0.0;
    let mut fails = 0;
    let (mut deg_bound, mut cn_bound) = (0.0, 0.0);
    for s in 0..samples {
        let sample_seed = derive(seed, 4000 + s);
        let (eps, g) = sbm(n, p, q, sample_seed)?;
        let deg = degree_concentration_report(&g, p, q, c);
        let opts = PairSampling { seed: sample_seed, ..PairSampling::default() };
        let cn = common_neighbor_concentration_report_with(&g, &eps, p, q, c, &opts);
        deg_worst = deg_worst.max(deg.max_rel_deviation);
        cn_worst = cn_worst.max(cn.max_rel_deviation);
        deg_bound = deg.predicted_bound;
        cn_bound = cn.predicted_bound;
        fails += usize::from(!deg.pass) + usize::from(!cn.pass);
    }
    Ok((
        fails == 0,
        format!(
            "n={n}, {samples} graphs: degree dev {deg_worst:.3} (bound {deg_bound:.3}), common-neighbour dev {cn_worst:.3} (bound {cn_bound:.3})"
        ),
    ))
}

/// `mean_collapse_ratio <= 0.2` at `n = 2000`, `p = 0.8`, `q = 0.2`.
pub fn collapse_check(seed: u64) -> Result<Outcome> {
    let params = CsbmParams::with_separation(2000, 4, 4.0, 1.0, 0.8, 0.2)?;
    let (ds, g) = sample_xor_csbm(&params, derive(seed, 5000))?;
    let ratio = mean_collapse_ratio(&ds, &g)?;
    Ok((ratio <= 0.2, format!("ratio {ratio:.4}")))
}

/// Finite-difference validation at step `1e-6`, `1e-5` relative. The quick
/// form covers the sweep architectures; the full form every plan with
/// `k_l in {0, 1, 2}` for depth 1 to 3 under both normalizations.
pub fn gradient_suite(all_plans: bool, seed: u64) -> Result<Outcome> {
    let params = CsbmParams::with_separation(30, 4, 2.0, 0.5, 0.4, 0.1)?;
    let (ds, g) = sample_xor_csbm(&params, derive(seed, 6000))?;
    let labels = ds.labels_f64();
    let mut targets: Vec<PlacementPlan> = SweepConfig::default()
        .parsed_archs()?
        .into_iter()
        .map(|a| a.plan)
        .collect();
    if all_plans {
        targets.clear();
        for depth in 1..=3u32 {
            for code in 0..3usize.pow(depth) {
                let k = (0..depth).map(|l| code / 3usize.pow(l) % 3).collect();
                targets.push(PlacementPlan::new(k));
            }
        }
    }
    let modes: &[NormMode] = if all_plans { &[NormMode::Row, NormMode::Symmetric] } else { &[NormMode::Row] };
    let cfg = TrainConfig { hidden: 6, ..TrainConfig::default() };
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &mode in modes {
        let op = normalize(&g, mode)?;
        for plan in &targets {
            let mut attempt = 0;
            let check = loop {
                let net = init_network(4, plan, &cfg, derive(seed, 7000 + attempt))?;
                let c = gradient_check(&net, Some(&op), ds.x.view(), plan, labels.view(), 1e-6)?;
                if c.kink_distance > 1e-4 || attempt >= 50 {
                    break c;
                }
                attempt += 1;
            };
            worst = worst.max(check.max_rel_error);
            count += 1;
        }
    }
    Ok((worst <= 1e-5, format!("{count} plan/normalization pairs, max relative error {worst:.2e}")))
}

/// Training settings of the scaled phase-diagram reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSettings {
    pub n: usize,
    pub trials: usize,
    pub k_grid: KGrid,
    pub train: TrainConfig,
    pub level: f64,
    pub ratio_band: (f64, f64),
    pub dense_margin: f64,
}

impl Default for PhaseSettings {
    fn default() -> Self {
        PhaseSettings {
            n: 400,
            trials: 10,
            k_grid: KGrid { min: 0.3, max: 30.0, count: 16, relative: false },
            train: TrainConfig::default(),
            level: 0.9,
            ratio_band: (1.5, 6.0),
            dense_margin: 0.05,
        }
    }
}

impl PhaseSettings {
    fn config(&self, pq: (f64, f64), archs: &[&str], seed: u64) -> SweepConfig {
        SweepConfig {
            n: self.n,
            d: 4,
            sigma: 0.5,
            k_grid: self.k_grid.clone(),
            pq: vec![pq],
            archs: archs.iter().map(|s| s.to_string()).collect(),
            trials: self.trials,
            seed,
            train: self.train.clone(),
            ..SweepConfig::default()
        }
    }
}

/// Parts (a), (b) and (c) of the phase-diagram criterion, evaluated on sweep rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub crossings: Vec<(String, Option<f64>)>,
    pub ratio: Option<f64>,
    pub dense_gap: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub pass_c: bool,
}

fn curve<'a>(curves: &'a std::collections::BTreeMap<(String, u64, u64), Vec<CurvePoint>>, arch: &str) -> &'a [CurvePoint] {
    curves.iter().find(|((a, _, _), _)| a == arch).map(|(_, c)| c.as_slice()).unwrap_or(&[])
}

pub fn evaluate_phase(sparse: &[SweepRow], dense: &[SweepRow], s: &PhaseSettings) -> PhaseOutcome {
    let sc = mean_curves(sparse);
    let mlp = crossing_k(curve(&sc, "MLP2"), s.level);
    let conv = ["2L-01", "2L-02", "3L-010", "3L-011"];
    let crossings: Vec<(String, Option<f64>)> = std::iter::once(("MLP2".to_string(), mlp))
        .chain(conv.iter().map(|a| (a.to_string(), crossing_k(curve(&sc, a), s.level))))
        .collect();
    let pass_a = match mlp {
        Some(m) => crossings[1..].iter().all(|(_, c)| c.is_some_and(|c| c < m)),
        None => crossings[1..].iter().all(|(_, c)| c.is_some()),
    };
    let ratio = match (mlp, crossings[1].1) {
        (Some(m), Some(one)) => Some(m / one),
        _ => None,
    };
    let pass_b = ratio.is_some_and(|r| r >= s.ratio_band.0 && r <= s.ratio_band.1);
    let dc = mean_curves(dense);
    let mut dense_gap = f64::NEG_INFINITY;
    for (two, one) in [("2L-02", "2L-01"), ("3L-011", "3L-010")] {
        for (a, b) in curve(&dc, two).iter().zip(curve(&dc, one)) {
            dense_gap = dense_gap.max(a.mean - b.mean);
        }
    }
    let pass_c = dense_gap <= s.dense_margin;
    PhaseOutcome { crossings, ratio, dense_gap, pass_a, pass_b, pass_c }
}

/// Scaled reproduction of the synthetic phase diagram at `n = 400`, `d = 4`,
/// `sigma^2 = 1/d`: sparse `(0.2, 0.02)` for (a) and (b), dense `(0.5, 0.1)` for (c).
pub fn phase_diagram_check(s: &PhaseSettings, seed: u64) -> Result<Outcome> {
    let archs = ["MLP2", "2L-01", "2L-02", "3L-010", "3L-011"];
    let sparse = run_sweep_rows(&s.config((0.2, 0.02), &archs, seed), 1)?;
    let dense = run_sweep_rows(&s.config((0.5, 0.1), &archs[1..], derive(seed, 1)), 1)?;
    let o = evaluate_phase(&sparse, &dense, s);
    let fmt_k = |k: &Option<f64>| k.map_or("none".to_string(), |v| format!("{v:.2}"));
    let crossings: Vec<String> = o.crossings.iter().map(|(a, k)| format!("{a}={}", fmt_k(k))).collect();
    Ok((
        o.pass_a && o.pass_b && o.pass_c,
        format!(
            "crossings {} (a: {}); MLP2/2L-01 ratio {} (b: {}); dense max two-minus-one gap {:.3} (c: {})",
            crossings.join(" "),
            o.pass_a,
            fmt_k(&o.ratio),
            o.pass_b,
            o.dense_gap,
            o.pass_c
        ),
    ))
}
