//! Closed-form quantities for the XOR-GMM / XOR-CSBM model: the Bayes rule,
//! the misclassification floor, the folded-Gaussian gap `zeta`, threshold
//! curves and predicted cross-entropy losses.

use serde::{Deserialize, Serialize};
use libm::{erf, erfc};

use crate::error::{Error, Result};
use crate::synthdata::dot;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `1 - Phi(x)` for the standard normal, via `erfc` (relative error near
/// machine precision over the whole line, including the far tail).
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Bayes rule for XOR-GMM: class 1 iff `|<x, mu>| < |<x, nu>|`. Ties go to 0.
pub fn bayes_classify(x: &[f64], mu: &[f64], nu: &[f64]) -> u8 {
    u8::from(dot(x, mu).abs() < dot(x, nu).abs())
}

/// `tau_K = 2 Phi_c(K/2)^2`, the floor on the fraction of points any
/// classifier misclassifies when `|mu - nu| <= K sigma`.
pub fn misclassification_floor(k: f64) -> Result<f64> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::param(format!("K must be >= 0, got {k}")));
    }
    Ok(2.0 * normal_sf(k / 2.0).powi(2))
}

/// Exact misclassification probability of the Bayes rule at `K = |mu - nu| / sigma`:
/// `P(|U| < |Z_1|)` with `U ~ N(K/sqrt2, 1)` independent of `Z_1 ~ N(0, 1)`,
/// evaluated by composite Simpson quadrature over `U`, split at the kink `U = 0`.
pub fn bayes_error_rate(k: f64) -> Result<f64> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::param(format!("K must be >= 0, got {k}")));
    }
    let shift = k / std::f64::consts::SQRT_2;
    let integrand = |u: f64| (-0.5 * (u - shift).powi(2)).exp() / SQRT_2PI * 2.0 * normal_sf(u.abs());
    let (lo, hi) = (shift - 12.0, shift + 12.0);
    if lo >= 0.0 {
        return Ok(simpson(integrand, lo, hi, 16000));
    }
    Ok(simpson(integrand, lo, 0.0, 8000) + simpson(integrand, 0.0, hi, 8000))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut acc = f(a) + f(b);
    for s in 1..steps {
        let w = if s % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + s as f64 * h);
    }
    acc * h / 3.0
}

/// `zeta(x, y) = x erf(x / (sqrt2 y)) - y sqrt(2/pi) (1 - exp(-x^2 / (2 y^2)))`,
/// the gap `E|N(x, y^2)| - E|N(0, y^2)|`.
pub fn zeta(x: f64, y: f64) -> Result<f64> {
    if y.is_nan() || y <= 0.0 {
        return Err(Error::param(format!("zeta needs y > 0, got {y}")));
    }
    let t = x * x / (2.0 * y * y);
    Ok(x * erf(x / (std::f64::consts::SQRT_2 * y)) + y * (2.0 / std::f64::consts::PI).sqrt() * (-t).exp_m1())
}

/// Constants standing in for the unspecified `Omega(.)` factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    /// Multiplier of every threshold curve.
    pub threshold: f64,
    /// `C` in the graph-convolution loss exponents.
    pub loss: f64,
}

impl Default for TheoryConstants {
    fn default() -> Self {
        // zeta(g', s) ~ g'^2 / (sqrt(2 pi) s) with g' = gamma / sqrt2
        TheoryConstants { threshold: 1.0, loss: 1.0 / (2.0 * SQRT_2PI) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub gamma_mlp: f64,
    pub gamma_one_conv: f64,
    pub gamma_two_conv: f64,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub sigma: f64,
    pub epsilon: f64,
}

impl ThresholdSet {
    /// `(regime, gamma, K = gamma / sigma)` rows.
    pub fn rows(&self) -> [(Regime, f64, f64); 3] {
        let k = |g: f64| if self.sigma > 0.0 { g / self.sigma } else { f64::NAN };
        [
            (Regime::Mlp, self.gamma_mlp, k(self.gamma_mlp)),
            (Regime::OneConv, self.gamma_one_conv, k(self.gamma_one_conv)),
            (Regime::TwoConv, self.gamma_two_conv, k(self.gamma_two_conv)),
        ]
    }
}

/// Separation thresholds of the three regimes with unit constants:
/// `sigma (log n)^{1/2+eps}`, `sigma sqrt(log n) / (n(p+q))^{1/4}` and
/// `sigma sqrt(log n) / n^{1/4}`.
pub fn thresholds(n: usize, p: f64, q: f64, sigma: f64, epsilon: f64) -> Result<ThresholdSet> {
    thresholds_with(n, p, q, sigma, epsilon, &TheoryConstants::default())
}

pub fn thresholds_with(
    n: usize,
    p: f64,
    q: f64,
    sigma: f64,
    epsilon: f64,
    consts: &TheoryConstants,
) -> Result<ThresholdSet> {
    if n < 2 {
        return Err(Error::param("thresholds need n >= 2"));
    }
    let nf = n as f64;
    let log_n = nf.ln();
    let c = consts.threshold;
    Ok(ThresholdSet {
        gamma_mlp: c * sigma * log_n.powf(0.5 + epsilon),
        gamma_one_conv: c * sigma * log_n.sqrt() / (nf * (p + q)).powf(0.25),
        gamma_two_conv: c * sigma * log_n.sqrt() / nf.powf(0.25),
        n,
        p,
        q,
        sigma,
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Mlp,
    OneConv,
    TwoConv,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Mlp => "mlp",
            Regime::OneConv => "one_conv",
            Regime::TwoConv => "two_conv",
        }
    }
}

/// Predicted loss `value` with the envelope `[value/2, value]` spanned by
/// the constant `C' in [1/2, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossPrediction {
    pub regime: Regime,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `Gamma(p, q) = |p - q| / (p + q)`.
pub fn gamma_pq(p: f64, q: f64) -> f64 {
    if p + q == 0.0 {
        0.0
    } else {
        (p - q).abs() / (p + q)
    }
}

/// Leading-order cross-entropy of the ansatz networks.
///
/// * `Mlp`: `exp(-R gamma / sqrt2)`
/// * `OneConv`: `exp(-(C R gamma^2 / sigma) Gamma(p,q))`
/// * `TwoConv`: `exp(-(C R gamma^2 / sigma) Gamma(p,q)^2)`
///
/// `n` is recorded by callers for context; the leading term does not use it.
pub fn predicted_loss(regime: Regime, r: f64, gamma: f64, sigma: f64, p: f64, q: f64, _n: usize) -> LossPrediction {
    predicted_loss_with(regime, r, gamma, sigma, p, q, &TheoryConstants::default())
}

pub fn predicted_loss_with(
    regime: Regime,
    r: f64,
    gamma: f64,
    sigma: f64,
    p: f64,
    q: f64,
    consts: &TheoryConstants,
) -> LossPrediction {
    let exponent = match regime {
        Regime::Mlp => r * gamma / std::f64::consts::SQRT_2,
        Regime::OneConv | Regime::TwoConv => {
            let power = if regime == Regime::OneConv { 1 } else { 2 };
            let signal = gamma_pq(p, q).powi(power);
            if signal == 0.0 || r == 0.0 {
                0.0
            } else {
                consts.loss * r * gamma * gamma / sigma * signal
            }
        }
    };
    let value = (-exponent).exp();
    LossPrediction { regime, value, lower: value / 2.0, upper: value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bayes_examples() {
        let mu = [1.0, 0.0];
        let nu = [0.0, 1.0];
        assert_eq!(bayes_classify(&mu, &mu, &nu), 0);
        assert_eq!(bayes_classify(&[0.0, -1.0], &mu, &nu), 1);
        assert_eq!(bayes_classify(&[1.0, 1.0], &mu, &nu), 0);
    }

    #[test]
    fn floor_values() {
        assert_eq!(misclassification_floor(0.0).unwrap(), 0.5);
        assert!(misclassification_floor(60.0).unwrap() < 1e-300);
        // 2 * Phi_c(1)^2, Phi_c(1) = 0.15865525393145705
        let expect = 2.0 * 0.158_655_253_931_457_05f64.powi(2);
        assert!((misclassification_floor(2.0).unwrap() - expect).abs() < 1e-15);
        assert!((misclassification_floor(2.0).unwrap() - 0.0503).abs() < 1e-4);
        assert!((misclassification_floor(1.0).unwrap() - 0.1904).abs() < 1e-4);
        assert!(misclassification_floor(-1.0).is_err());
    }

    #[test]
    fn normal_sf_reference_values() {
        // scipy.stats.norm.sf
        assert!((normal_sf(0.5) - 0.308_537_538_725_986_9).abs() < 1e-15);
        assert!((normal_sf(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-16);
        assert!((normal_sf(10.0) / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bayes_error_dominates_floor() {
        for k in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let exact = bayes_error_rate(k).unwrap();
            assert!(exact >= misclassification_floor(k).unwrap() - 1e-12, "K={k}");
        }
        assert!((bayes_error_rate(0.0).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(0.0, 1.0).unwrap(), 0.0);
        assert!((zeta(1.0, 1.0).unwrap() - 0.36874).abs() < 1e-5);
        let small = zeta(0.1, 1.0).unwrap();
        assert!((small - 0.00399).abs() < 1e-5);
        assert!((small - 0.01 / SQRT_2PI).abs() < 2e-5);
        assert!(zeta(1.0, 0.0).is_err());
    }

    #[test]
    fn zeta_small_argument_limit() {
        for x in [1e-2, 1e-3] {
            let scaled = zeta(x, 1.0).unwrap() * SQRT_2PI / (x * x);
            assert!((scaled - 1.0).abs() < 1e-4, "{scaled}");
        }
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(400, 0.2, 0.02, 0.5, 0.0).unwrap();
        let ratio = t.gamma_mlp / t.gamma_one_conv;
        assert!((ratio - 88f64.powf(0.25)).abs() < 1e-12);
        assert!((ratio - 3.06).abs() < 0.01);
        let t = thresholds(400, 1.0 / 800.0, 1.0 / 800.0, 0.5, 0.0).unwrap();
        assert!((t.gamma_one_conv - t.gamma_mlp).abs() < 1e-12);
        let t = thresholds(400, 0.3, 0.2, 1.0, 0.0).unwrap();
        assert!(t.gamma_two_conv < t.gamma_one_conv);
        assert!(thresholds(1, 0.3, 0.2, 1.0, 0.0).is_err());
    }

    #[test]
    fn loss_prediction_examples() {
        let l = predicted_loss(Regime::Mlp, 0.0, 3.0, 1.0, 0.5, 0.1, 100);
        assert_eq!((l.lower, l.upper), (0.5, 1.0));
        assert!(l.lower <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= l.upper);
        let l = predicted_loss(Regime::OneConv, 2.0, 3.0, 1.0, 0.3, 0.3, 100);
        assert_eq!(l.value, 1.0);
        let gamma = 10.0 * std::f64::consts::SQRT_2;
        let l = predicted_loss(Regime::Mlp, 1.0, gamma, 1.0, 0.3, 0.3, 100);
        assert!((l.value - 4.54e-5).abs() < 1e-7);
        let one = predicted_loss(Regime::OneConv, 1.0, 2.0, 1.0, 0.5, 0.1, 100);
        let two = predicted_loss(Regime::TwoConv, 1.0, 2.0, 1.0, 0.5, 0.1, 100);
        assert!(two.value > one.value);
    }

    proptest! {
        #[test]
        fn floor_strictly_decreasing(a in 0.0f64..20.0, b in 0.0f64..20.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (fl, fh) = (misclassification_floor(lo).unwrap(), misclassification_floor(hi).unwrap());
            prop_assert!(fh < fl);
            prop_assert!(fh > 0.0 && fl <= 0.5);
        }

        #[test]
        fn bayes_symmetries(x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, x2 in -5.0f64..5.0, s in 0.1f64..3.0) {
            let mu = [s, 0.0, 0.0];
            let nu = [0.0, s, 0.0];
            let x = [x0, x1, x2];
            let neg = [-x0, -x1, -x2];
            prop_assert_eq!(bayes_classify(&x, &mu, &nu), bayes_classify(&neg, &mu, &nu));
            let a = dot(&x, &mu).abs();
            let b = dot(&x, &nu).abs();
            prop_assume!(a != b);
            prop_assert_eq!(bayes_classify(&x, &nu, &mu), 1 - bayes_classify(&x, &mu, &nu));
        }

        #[test]
        fn zeta_nonnegative_increasing(x in 0.0f64..8.0, dx in 1e-3f64..2.0, y in 0.1f64..4.0) {
            let a = zeta(x, y).unwrap();
            let b = zeta(x + dx, y).unwrap();
            prop_assert!(a >= -1e-15);
            prop_assert!(b >= a);
        }

        #[test]
        fn threshold_ordering(n in 3usize..100_000, p in 0.0f64..0.5, q in 0.0f64..0.5) {
            prop_assume!(n as f64 * (p + q) >= 2.0);
            let t = thresholds(n, p, q, 1.0, 0.0).unwrap();
            prop_assert!(t.gamma_two_conv <= t.gamma_one_conv * (1.0 + 1e-12));
            prop_assert!(t.gamma_one_conv <= t.gamma_mlp * (1.0 + 1e-12));
        }
    }
}
