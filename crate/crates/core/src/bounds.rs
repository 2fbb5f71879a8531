//! Closed-form constants and probability bounds for majority dynamics on
//! `G(2n, lambda / sqrt(n))`.
//!
//! Hard domain violations (non-positive `lambda`, probabilities outside
//! `[0, 1]`, counts out of range) are errors. Preconditions that only limit
//! where a bound is known to hold (e.g. `psi_n * p_n >= 1`, `theta > 5`,
//! `rho < 3/2`) produce a report with `valid = false` and a reason instead.
//! Probability-valued bounds keep the raw value and clamp a copy to `[0, 1]`;
//! several of them are vacuous over large parts of parameter space.

use std::f64::consts::{E, PI};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::special::{erfc, round_half_up};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("domain violation: {0}")]
    Domain(String),
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), BoundsError> {
    if cond {
        Ok(())
    } else {
        Err(BoundsError::Domain(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<(), BoundsError> {
    require(v.is_finite() && v > 0.0, || format!("{name} > 0 required, got {v}"))
}

/// Named parameters in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(Vec<(String, f64)>);

impl Params {
    pub fn push(&mut self, name: &str, value: f64) {
        self.0.push((name.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// `k1=v1;k2=v2;...` with round-trip float formatting.
    pub fn to_list(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={v:?}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// One evaluated constant or bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(rename = "param_list")]
    pub params: Params,
    pub raw_value: f64,
    /// `min(1, max(0, raw_value))` for probability-valued bounds.
    #[serde(rename = "clamped")]
    pub clamped_probability: Option<f64>,
    pub valid: bool,
    pub reason: Option<String>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "name,param_list,raw_value,clamped,valid";

    fn constant(name: &str, params: Params, value: f64) -> Self {
        Self {
            name: name.to_string(),
            params,
            raw_value: value,
            clamped_probability: None,
            valid: true,
            reason: None,
        }
    }

    fn probability(name: &str, params: Params, raw: f64) -> Self {
        Self {
            name: name.to_string(),
            params,
            raw_value: raw,
            clamped_probability: Some(clamp_probability(raw)),
            valid: true,
            reason: None,
        }
    }

    fn invalidate(&mut self, reason: String) {
        self.valid = false;
        self.reason = Some(match self.reason.take() {
            Some(prev) => format!("{prev}; {reason}"),
            None => reason,
        });
    }

    fn check(&mut self, cond: bool, reason: impl FnOnce() -> String) {
        if !cond {
            self.invalidate(reason());
        }
    }

    /// The clamped probability, or the raw value for constants.
    pub fn value(&self) -> f64 {
        self.clamped_probability.unwrap_or(self.raw_value)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name)
    }

    pub fn csv_row(&self) -> String {
        let clamped = self.clamped_probability.map(|c| format!("{c:?}")).unwrap_or_default();
        format!(
            "{},{},{:?},{},{}",
            self.name,
            self.params.to_list(),
            self.raw_value,
            clamped,
            self.valid
        )
    }
}

pub fn clamp_probability(raw: f64) -> f64 {
    if raw.is_nan() {
        return f64::NAN;
    }
    raw.clamp(0.0, 1.0)
}

/// Binary Kullback–Leibler divergence `D(a || b)` in nats, with `0 log 0 = 0`.
///
/// Returns `+inf` when `b` is `0` or `1` and `a != b`, and `NaN` outside
/// `[0, 1]^2`. Near `a = b` the divergence is summed from its Taylor series in
/// `d = a - b` so that it keeps full relative precision.
pub fn binary_kl(a: f64, b: f64) -> f64 {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return f64::NAN;
    }
    if a == b {
        return 0.0;
    }
    if b == 0.0 || b == 1.0 {
        return f64::INFINITY;
    }
    let d = a - b;
    let c = 1.0 - b;
    if d.abs() < 1e-3 * b.min(c) {
        // D = sum_{k>=2} d^k / (k(k-1)) * ((-1)^k / b^{k-1} + 1 / c^{k-1})
        let mut sum = 0.0;
        let mut dk = d; // d^{k-1}
        let mut inv_b = 1.0; // b^{-(k-2)}
        let mut inv_c = 1.0;
        for k in 2..12u32 {
            dk *= d;
            inv_b /= b;
            inv_c /= c;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += dk / f64::from(k * (k - 1)) * (sign * inv_b + inv_c);
        }
        return sum;
    }
    let first = if a == 0.0 { 0.0 } else { a * (d / b).ln_1p() };
    let second = if a == 1.0 { 0.0 } else { (1.0 - a) * (-d / c).ln_1p() };
    (first + second).max(0.0)
}

/// Pinsker lower bound `2 (a - b)^2` on `D(a || b)` (total variation `|a - b|`).
pub fn pinsker_lower(a: f64, b: f64) -> f64 {
    2.0 * (a - b) * (a - b)
}

/// Reverse Pinsker upper bound `2 / min(b, 1 - b) * (a - b)^2` on `D(a || b)`.
pub fn reverse_pinsker_upper(a: f64, b: f64) -> f64 {
    2.0 / b.min(1.0 - b) * (a - b) * (a - b)
}

/// `C0(alpha, lambda) = pi / (8 e^4) * ([alpha lambda - sqrt(2 alpha lambda)]_+ + 1) e^{-4/lambda} / lambda`.
pub fn c0(alpha: f64, lambda: f64) -> Result<f64, BoundsError> {
    positive("alpha", alpha)?;
    positive("lambda", lambda)?;
    let al = alpha * lambda;
    let positive_part = (al - (2.0 * al).sqrt()).max(0.0);
    Ok(PI / (8.0 * E.powi(4)) * (positive_part + 1.0) * (-4.0 / lambda).exp() / lambda)
}

/// `C1(beta, lambda) = (pi beta)^{3/2} e^{-(4 + 2 beta)/lambda} e^{-4 beta^2 lambda} / (e^6 sqrt(lambda))`.
pub fn c1(beta: f64, lambda: f64) -> Result<f64, BoundsError> {
    positive("beta", beta)?;
    positive("lambda", lambda)?;
    let log = 1.5 * (PI * beta).ln() - (4.0 + 2.0 * beta) / lambda - 4.0 * beta * beta * lambda - 6.0 - 0.5 * lambda.ln();
    Ok(log.exp())
}

/// Report for `C0`, with the per-agent lower bound `1/2 + C0 / n^{1/4}` when `n` is given.
pub fn c0_report(alpha: f64, lambda: f64, n: Option<f64>) -> Result<BoundReport, BoundsError> {
    let value = c0(alpha, lambda)?;
    let mut params = Params::default();
    params.push("alpha", alpha);
    params.push("lambda", lambda);
    if let Some(n) = n {
        positive("n", n)?;
        params.push("n", n);
        params.push("update_lower", 0.5 + value / n.powf(0.25));
    }
    Ok(BoundReport::constant("c0", params, value))
}

/// Report for `C1`, with the per-agent lower bound `1/2 + C1`.
pub fn c1_report(beta: f64, lambda: f64) -> Result<BoundReport, BoundsError> {
    let value = c1(beta, lambda)?;
    let mut params = Params::default();
    params.push("beta", beta);
    params.push("lambda", lambda);
    params.push("update_lower", 0.5 + value);
    Ok(BoundReport::constant("c1", params, value))
}

/// The `alpha` with `P{|Z| >= alpha} = 1 - epsilon/2` for `Z ~ Normal(0, 1/2)`.
///
/// `P{|Z| >= alpha} = erfc(alpha)` for this variance, so the root of
/// `erfc(alpha) = 1 - epsilon/2` is bracketed in `[0, 27]` and bisected to an
/// interval narrower than `1e-13`.
pub fn alpha_for_epsilon(epsilon: f64) -> Result<f64, BoundsError> {
    require(epsilon > 0.0 && epsilon < 2.0, || format!("epsilon in (0, 2) required, got {epsilon}"))?;
    let target = 1.0 - epsilon / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 27.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if erfc(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn alpha_report(epsilon: f64) -> Result<BoundReport, BoundsError> {
    let value = alpha_for_epsilon(epsilon)?;
    let mut params = Params::default();
    params.push("epsilon", epsilon);
    Ok(BoundReport::constant("alpha", params, value))
}

fn check_n(n: f64) -> Result<(), BoundsError> {
    require(n.is_finite() && n >= 1.0, || format!("n >= 1 required, got {n}"))
}

/// `P{N(X_1; 0) >= n + C0 n^{3/4}} >= 1 - exp(-C0^2 sqrt(n))` from an
/// `n + alpha sqrt(n)` zero start.
pub fn prop3_success_bound(n: f64, alpha: f64, lambda: f64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    let c = c0(alpha, lambda)?;
    let mut params = Params::default();
    params.push("n", n);
    params.push("alpha", alpha);
    params.push("lambda", lambda);
    params.push("c0", c);
    params.push("threshold", round_half_up(n + c * n.powf(0.75)) as f64);
    let raw = -(-c * c * n.sqrt()).exp_m1();
    Ok(BoundReport::probability("prop3", params, raw))
}

/// `P{N(X_1; 0) >= n + C1 n} >= 1 - exp(-C1^2 n)` from an `n + beta n^{3/4}` zero start.
pub fn prop5_success_bound(n: f64, beta: f64, lambda: f64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    let c = c1(beta, lambda)?;
    let mut params = Params::default();
    params.push("n", n);
    params.push("beta", beta);
    params.push("lambda", lambda);
    params.push("c1", c);
    params.push("threshold", round_half_up(n + c * n) as f64);
    let raw = -(-c * c * n).exp_m1();
    Ok(BoundReport::probability("prop5", params, raw))
}

/// One-round consensus from `n + gamma n` zeros on `G(2n, lambda / n^xi)`:
/// `1 - 2n sqrt((1+gamma)/(1-gamma)) exp(-lambda gamma^2 n^{1-xi})`.
pub fn prop6_consensus_bound(n: f64, gamma: f64, lambda: f64, xi: f64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    require(gamma > 0.0 && gamma < 1.0, || format!("gamma in (0, 1) required, got {gamma}"))?;
    positive("lambda", lambda)?;
    require((0.5..1.0).contains(&xi), || format!("xi in [1/2, 1) required, got {xi}"))?;
    let log_term = (2.0 * n).ln() + 0.5 * ((1.0 + gamma) / (1.0 - gamma)).ln() - lambda * gamma * gamma * n.powf(1.0 - xi);
    let mut params = Params::default();
    params.push("n", n);
    params.push("gamma", gamma);
    params.push("lambda", lambda);
    params.push("xi", xi);
    Ok(BoundReport::probability("prop6", params, 1.0 - log_term.exp()))
}

/// `P{N(X_1; 0) >= n + B_n} <= exp(-2n D(1/2 + B_n/(2n) || P_n))` when every
/// agent updates to `0` with probability at most `P_n`.
pub fn prop7_overshoot_bound(n: f64, b_n: f64, p_upper: f64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    require(b_n.is_finite() && b_n >= 0.0, || format!("B_n >= 0 required, got {b_n}"))?;
    require(b_n <= n, || format!("1/2 + B_n/(2n) <= 1 required, got B_n = {b_n} > n = {n}"))?;
    require(p_upper > 0.0 && p_upper < 1.0, || format!("P_n in (0, 1) required, got {p_upper}"))?;
    let target = 0.5 + b_n / (2.0 * n);
    let d = binary_kl(target, p_upper);
    let mut params = Params::default();
    params.push("n", n);
    params.push("b_n", b_n);
    params.push("p_n", p_upper);
    params.push("divergence", d);
    let mut report = BoundReport::probability("prop7", params, (-2.0 * n * d).exp());
    report.check(target >= p_upper, || {
        format!("1/2 + B_n/(2n) = {target} below P_n = {p_upper}; not an upper-tail event")
    });
    Ok(report)
}

/// `delta_n` defined by `n^{delta_n} = sqrt(log(n^theta))`.
pub fn delta_n(n: f64, theta: f64) -> f64 {
    (theta * n.ln()).ln() / (2.0 * n.ln())
}

/// `P_n <= 1/2 + 60 psi_n p_n / (lambda n^{1/4 - delta_n})` with `p_n = lambda / sqrt(n)`.
pub fn prop8_update_upper(n: f64, psi_n: f64, lambda: f64, theta: f64) -> Result<BoundReport, BoundsError> {
    require(n.is_finite() && n > 1.0, || format!("n > 1 required, got {n}"))?;
    require(psi_n.is_finite() && psi_n >= 0.0 && psi_n <= n, || format!("0 <= psi_n <= n required, got {psi_n}"))?;
    positive("lambda", lambda)?;
    positive("theta", theta)?;
    let p_n = lambda / n.sqrt();
    require(p_n <= 1.0, || format!("p_n = lambda/sqrt(n) <= 1 required, got {p_n}"))?;
    let log_factor = theta * n.ln();
    let raw = 0.5 + 60.0 * psi_n * p_n * log_factor.sqrt() / (lambda * n.powf(0.25));
    let mut params = Params::default();
    params.push("n", n);
    params.push("psi_n", psi_n);
    params.push("lambda", lambda);
    params.push("theta", theta);
    params.push("p_n", p_n);
    params.push("psi_p", psi_n * p_n);
    params.push("delta_n", delta_n(n, theta));
    let mut report = BoundReport::probability("prop8", params, raw);
    report.check(psi_n * p_n >= 1.0, || format!("psi_n * p_n >= 1 required, got {}", psi_n * p_n));
    report.check(theta > 5.0, || format!("theta > 5 required, got {theta}"));
    report.check(log_factor > 1.0, || format!("theta * log(n) > 1 required, got {log_factor}"));
    Ok(report)
}

/// `P{Con(1)} <= exp(-(n C^2 / (2(n + C))) exp(-32 lambda C^2 / (sqrt(n)(n - C))))`
/// from `n + C_n` agents holding one opinion.
pub fn prop9_consensus_upper(n: f64, c_n: f64, lambda: f64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    require(c_n.is_finite() && c_n >= 0.0, || format!("C_n >= 0 required, got {c_n}"))?;
    require(c_n < n, || format!("C_n < n required, got C_n = {c_n}, n = {n}"))?;
    positive("lambda", lambda)?;
    let inner = -32.0 * lambda * c_n * c_n / (n.sqrt() * (n - c_n));
    let outer = -(n * c_n * c_n / (2.0 * (n + c_n))) * inner.exp();
    let mut params = Params::default();
    params.push("n", n);
    params.push("c_n", c_n);
    params.push("lambda", lambda);
    params.push("inner_exponent", inner);
    let mut report = BoundReport::probability("prop9", params, outer.exp());
    report.check(c_n <= n / 2.0, || format!("C_n <= n/2 required (C_n/n -> 0 regime), got C_n/n = {}", c_n / n));
    Ok(report)
}

/// `P{X + i = Y} >= (pi / e^4) e^{-4/lambda} / (lambda n^{1/4}) exp(-i^2 / (lambda sqrt(n)))`
/// for independent `X, Y ~ Bin(n, lambda / sqrt(n))`, `0 <= i <= lambda sqrt(n)`.
pub fn lemma1_collision_lower(n: f64, lambda: f64, i: u64) -> Result<BoundReport, BoundsError> {
    check_n(n)?;
    positive("lambda", lambda)?;
    let sqrt_n = n.sqrt();
    require(lambda <= sqrt_n, || format!("p_n = lambda/sqrt(n) <= 1 required, got {}", lambda / sqrt_n))?;
    require((i as f64) <= lambda * sqrt_n, || format!("0 <= i <= lambda sqrt(n) = {} required, got {i}", lambda * sqrt_n))?;
    let i_f = i as f64;
    let raw = PI / E.powi(4) * (-4.0 / lambda).exp() / (lambda * n.powf(0.25)) * (-i_f * i_f / (lambda * sqrt_n)).exp();
    let mut params = Params::default();
    params.push("n", n);
    params.push("lambda", lambda);
    params.push("i", i_f);
    Ok(BoundReport::probability("lemma1", params, raw))
}

/// `P{X = Y} <= 15 / (lambda n^{1/4 - delta_n}) = 15 sqrt(theta log n) / (lambda n^{1/4})`
/// for `X, Y ~ Bin(n - psi_n, lambda / sqrt(n))`.
pub fn lemma2_collision_upper(n: f64, psi_n: f64, lambda: f64, theta: f64) -> Result<BoundReport, BoundsError> {
    require(n.is_finite() && n > 1.0, || format!("n > 1 required, got {n}"))?;
    require(psi_n.is_finite() && psi_n >= 0.0, || format!("psi_n >= 0 required, got {psi_n}"))?;
    require(n - psi_n >= 1.0, || format!("N = n - psi_n >= 1 required, got {}", n - psi_n))?;
    positive("lambda", lambda)?;
    positive("theta", theta)?;
    let log_factor = theta * n.ln();
    let raw = 15.0 * log_factor.sqrt() / (lambda * n.powf(0.25));
    let mut params = Params::default();
    params.push("n", n);
    params.push("psi_n", psi_n);
    params.push("lambda", lambda);
    params.push("theta", theta);
    params.push("trials", n - psi_n);
    params.push("delta_n", delta_n(n, theta));
    let mut report = BoundReport::probability("lemma2", params, raw);
    report.check(theta > 5.0, || format!("theta > 5 required, got {theta}"));
    report.check(log_factor > 1.0, || format!("theta * log(n) > 1 required, got {log_factor}"));
    Ok(report)
}

/// Upper bound on `P{N(X_2; 0) = 2n}`: the sum
/// `2n exp(-(rho/(256 lambda)) log(n) n^{3/2-rho}) + 2n exp(-(theta kappa/lambda) log^2(n) sqrt(n)) + exp(-(kappa/(64 lambda)) log n)`.
///
/// The addends are stored as params `first`, `second`, `third`, together with
/// `sigma_n = n^{3/4} sqrt(rho log n) / sqrt(64 lambda)` and
/// `tau_n = n^{1/2} sqrt(kappa log n) / sqrt(64 lambda)`.
pub fn theorem2_total_bound(n: f64, lambda: f64, rho: f64, kappa: f64, theta: f64) -> Result<BoundReport, BoundsError> {
    require(n.is_finite() && n > 1.0, || format!("n > 1 required, got {n}"))?;
    positive("lambda", lambda)?;
    positive("rho", rho)?;
    positive("kappa", kappa)?;
    positive("theta", theta)?;
    let ln = n.ln();
    let log_2n = (2.0 * n).ln();
    let first = (log_2n - rho / (256.0 * lambda) * ln * n.powf(1.5 - rho)).exp();
    let second = (log_2n - theta * kappa / lambda * ln * ln * n.sqrt()).exp();
    let third = n.powf(-kappa / (64.0 * lambda));
    let scale = (64.0 * lambda).sqrt();
    let mut params = Params::default();
    params.push("n", n);
    params.push("lambda", lambda);
    params.push("rho", rho);
    params.push("kappa", kappa);
    params.push("theta", theta);
    params.push("sigma_n", n.powf(0.75) * (rho * ln).sqrt() / scale);
    params.push("tau_n", n.sqrt() * (kappa * ln).sqrt() / scale);
    params.push("first", first);
    params.push("second", second);
    params.push("third", third);
    let mut report = BoundReport::probability("thm2", params, first + second + third);
    report.check(rho < 1.5, || format!("rho in (0, 3/2) required, got {rho}"));
    report.check(theta > 5.0, || format!("theta > 5 required, got {theta}"));
    Ok(report)
}

/// `(ln lower, ln upper)` of `sqrt(2 pi n) n^n e^{-n} <= n! <= e sqrt(n) n^n e^{-n}`.
pub fn stirling_envelope(n: u64) -> Result<(f64, f64), BoundsError> {
    require(n >= 1, || "n >= 1 required".to_string())?;
    let x = n as f64;
    let core = x * x.ln() - x;
    Ok((0.5 * (2.0 * PI * x).ln() + core, 1.0 + 0.5 * x.ln() + core))
}
