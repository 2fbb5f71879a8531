//! Exact binomial computations used as ground truth for the bounds.
//!
//! Binomial PMFs use the saddle-point form (Loader 2000): `log P(k)` is
//! assembled from Stirling remainders and the deviance `bd0`, which keeps
//! full relative precision far into the tails without a log-gamma function.
//! Tail sums of the form `P{A >= B + s}` for independent binomials are
//! evaluated as `sum_b P(B = b) P(A >= b + s)` with a precomputed survival
//! array, so every double summation is linear in the counts and runs over the
//! full support.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::binary_kl;
use crate::dynamics::Opinion;
use crate::special::{ln_factorial, log_sum_exp, KahanSum};

/// Largest total Bernoulli count accepted by [`chernoff_mgf_bound_check`].
pub const MAX_EXACT_TRIALS: u64 = 50_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("k = {k} outside the support 0..={trials}")]
    OutOfSupport { k: u64, trials: u64 },
    #[error("count underflow: own opinion {own:?} needs at least one agent of that opinion (zeros = {zeros}, ones = {ones})")]
    CountUnderflow { own: Opinion, zeros: u64, ones: u64 },
    #[error("|imbalance| = {imbalance} exceeds n = {n}")]
    ImbalanceOutOfRange { n: u64, imbalance: i64 },
    #[error("{0} Bernoulli variables exceed the exact-mode limit")]
    TooLarge(u64),
}

/// `Bin(trials, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialSpec {
    pub trials: u64,
    pub p: f64,
}

impl BinomialSpec {
    pub fn new(trials: u64, p: f64) -> Result<Self, OracleError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(OracleError::InvalidProbability(p));
        }
        Ok(Self { trials, p })
    }

    pub fn log_pmf(&self, k: u64) -> Result<f64, OracleError> {
        if k > self.trials {
            return Err(OracleError::OutOfSupport { k, trials: self.trials });
        }
        Ok(log_pmf_unchecked(self.trials, self.p, k))
    }

    /// `ln P(X = k)` for `k = 0..=trials`.
    pub fn log_pmf_vec(&self) -> Vec<f64> {
        (0..=self.trials).map(|k| log_pmf_unchecked(self.trials, self.p, k)).collect()
    }

    pub fn pmf_vec(&self) -> Vec<f64> {
        self.log_pmf_vec().into_iter().map(f64::exp).collect()
    }

    /// `P(X >= k)` for `k = 0..=trials + 1`, summed from the upper tail.
    pub fn survival_vec(&self) -> Vec<f64> {
        let pmf = self.pmf_vec();
        let mut out = vec![0.0; pmf.len() + 1];
        let mut acc = KahanSum::default();
        for k in (0..pmf.len()).rev() {
            acc.add(pmf[k]);
            out[k] = acc.total().min(1.0);
        }
        out
    }

    pub fn mean(&self) -> f64 {
        self.trials as f64 * self.p
    }
}

/// `ln P(Bin(spec.trials, spec.p) = k)`.
pub fn log_pmf(spec: BinomialSpec, k: u64) -> Result<f64, OracleError> {
    spec.log_pmf(k)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln k! - ((k + 1/2) ln k - k + ln sqrt(2 pi))`.
fn stirlerr(k: u64) -> f64 {
    let x = k as f64;
    if k <= 15 {
        return ln_factorial(k) - ((x + 0.5) * x.ln() - x + LN_SQRT_2PI);
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    (S0 - (S1 - (S2 - (S3 - S4 * inv2) * inv2) * inv2) * inv2) * inv
}

/// Deviance `x ln(x / m) + m - x`, accurate when `x` is close to `m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return s;
            }
            s = next;
        }
        return s;
    }
    x * (x / m).ln() + m - x
}

fn log_pmf_unchecked(trials: u64, p: f64, k: u64) -> f64 {
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == trials { 0.0 } else { f64::NEG_INFINITY };
    }
    let n = trials as f64;
    if k == 0 {
        return n * (-p).ln_1p();
    }
    if k == trials {
        return n * p.ln();
    }
    let x = k as f64;
    let y = n - x;
    let lc = stirlerr(trials) - stirlerr(k) - stirlerr(trials - k) - bd0(x, n * p) - bd0(y, n * q);
    lc + 0.5 * (n / (2.0 * PI * x * y)).ln()
}

/// `P{A >= B + shift}` for independent `A ~ Bin(a, p)`, `B ~ Bin(b, p)`.
fn prob_at_least_shifted(a: u64, b: u64, p: f64, shift: i64) -> f64 {
    let sa = BinomialSpec { trials: a, p }.survival_vec();
    let pb = BinomialSpec { trials: b, p }.pmf_vec();
    let survival = |m: i64| -> f64 {
        if m <= 0 {
            1.0
        } else if m as u64 > a {
            0.0
        } else {
            sa[m as usize]
        }
    };
    let total: KahanSum = pb
        .iter()
        .enumerate()
        .map(|(bv, &w)| w * survival(bv as i64 + shift))
        .collect();
    total.total().clamp(0.0, 1.0)
}

/// Log of `P{X + i = Y}` for independent `X, Y ~ Bin(n, p)`.
pub fn ln_collision_prob(n: u64, p: f64, i: u64) -> Result<f64, OracleError> {
    let spec = BinomialSpec::new(n, p)?;
    if i > n {
        return Ok(f64::NEG_INFINITY);
    }
    let lp = spec.log_pmf_vec();
    let terms: Vec<f64> = (0..=(n - i) as usize).map(|l| lp[l] + lp[l + i as usize]).collect();
    Ok(log_sum_exp(&terms))
}

/// `P{X + i = Y} = sum_l P(X = l) P(Y = l + i)` over the full support.
pub fn collision_prob(n: u64, p: f64, i: u64) -> Result<f64, OracleError> {
    ln_collision_prob(n, p, i).map(f64::exp)
}

/// `P{X + i = Y}` for `i = 0..=max_i`, sharing one PMF evaluation.
pub fn collision_probs(n: u64, p: f64, max_i: u64) -> Result<Vec<f64>, OracleError> {
    let spec = BinomialSpec::new(n, p)?;
    let lp = spec.log_pmf_vec();
    Ok((0..=max_i)
        .map(|i| {
            if i > n {
                return 0.0;
            }
            let terms: Vec<f64> = (0..=(n - i) as usize).map(|l| lp[l] + lp[l + i as usize]).collect();
            log_sum_exp(&terms).exp()
        })
        .collect())
}

/// The same probability summed over `Y`: `sum_y P(Y = y) P(X = y - i)`.
pub fn collision_prob_swapped(n: u64, p: f64, i: u64) -> Result<f64, OracleError> {
    let spec = BinomialSpec::new(n, p)?;
    if i > n {
        return Ok(0.0);
    }
    let lp = spec.log_pmf_vec();
    let terms: Vec<f64> = (i as usize..=n as usize)
        .rev()
        .map(|y| lp[y] + lp[y - i as usize])
        .collect();
    Ok(log_sum_exp(&terms).exp())
}

/// Decide-0 probabilities for one agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpdateProbability {
    /// Exact rule: strict neighbour majority wins, ties keep the own opinion.
    pub exact: f64,
    /// The agent's own opinion counted as one extra vote, ties keep it.
    pub surrogate: f64,
}

/// Probability that an agent holding `own` adopts 0 after one round, when the
/// population holds `zeros` and `ones` agents (the agent included) and each
/// other agent is a neighbour independently with probability `p`.
///
/// Exact event: `own = 0`: `Bin(zeros-1, p) >= Bin(ones, p)`;
/// `own = 1`: `Bin(zeros, p) > Bin(ones-1, p)`.
/// Surrogate: `own = 0`: `Bin(zeros-1, p) + 1 >= Bin(ones, p)`;
/// `own = 1`: `Bin(zeros, p) > Bin(ones-1, p) + 1`.
pub fn update_to_zero_exact(own: Opinion, zeros: u64, ones: u64, p: f64) -> Result<UpdateProbability, OracleError> {
    BinomialSpec::new(0, p)?;
    match own {
        Opinion::Zero => {
            if zeros == 0 {
                return Err(OracleError::CountUnderflow { own, zeros, ones });
            }
            Ok(UpdateProbability {
                exact: prob_at_least_shifted(zeros - 1, ones, p, 0),
                surrogate: prob_at_least_shifted(zeros - 1, ones, p, -1),
            })
        }
        Opinion::One => {
            if ones == 0 {
                return Err(OracleError::CountUnderflow { own, zeros, ones });
            }
            Ok(UpdateProbability {
                exact: prob_at_least_shifted(zeros, ones - 1, p, 1),
                surrogate: prob_at_least_shifted(zeros, ones - 1, p, 2),
            })
        }
    }
}

/// [`update_to_zero_exact`] with `zeros = n + imbalance`, `ones = n - imbalance`.
pub fn equal_split_update_prob(n: u64, imbalance: i64, p: f64, own: Opinion) -> Result<UpdateProbability, OracleError> {
    if imbalance.unsigned_abs() > n {
        return Err(OracleError::ImbalanceOutOfRange { n, imbalance });
    }
    let zeros = (n as i64 + imbalance) as u64;
    let ones = (n as i64 - imbalance) as u64;
    update_to_zero_exact(own, zeros, ones, p)
}

/// Which side of the tail the analytic value bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// Threshold at or above the mean: `P{S >= t} <= bound`.
    Upper,
    /// Threshold below the mean: `P{S >= t} >= bound`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffCheck {
    pub exact_tail: f64,
    pub analytic_bound: f64,
    pub side: BoundSide,
    pub mean: f64,
}

impl ChernoffCheck {
    /// Whether the exact tail respects the analytic bound (with `slack` absolute).
    pub fn holds(&self, slack: f64) -> bool {
        match self.side {
            BoundSide::Upper => self.exact_tail <= self.analytic_bound + slack,
            BoundSide::Lower => self.exact_tail + slack >= self.analytic_bound,
        }
    }
}

/// `ln E[e^{s X}]` for `X ~ Ber(q)`.
fn ln_bernoulli_mgf(q: f64, s: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else if q == 1.0 {
        s
    } else if s > 0.0 {
        s + (q + (1.0 - q) * (-s).exp()).ln()
    } else {
        (q * s.exp_m1()).ln_1p()
    }
}

/// Minimum over `s >= 0` of a convex function with `f(0) = 0`.
fn minimize_convex(f: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    while hi < 1e6 && f(2.0 * hi) < f(hi) {
        hi *= 2.0;
    }
    hi *= 2.0;
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(0.0)).min(f(hi))
}

/// Exact tail `P{S >= threshold}` for `S = X + Y` with `X ~ Bin(n + a_n, q0)`
/// and `Y ~ Bin(n - a_n, q1)` independent, next to the Chernoff value obtained
/// by exponential tilting.
///
/// At or above the mean the analytic value is `inf_s exp(K(s) - s t)`, an
/// upper bound on the tail; below the mean it is `1 - inf_s exp(K(-s) + s t)`,
/// a lower bound. `K` is the cumulant generating function of `S`.
pub fn chernoff_mgf_bound_check(n: u64, a_n: i64, q0: f64, q1: f64, threshold: f64) -> Result<ChernoffCheck, OracleError> {
    if a_n.unsigned_abs() > n {
        return Err(OracleError::ImbalanceOutOfRange { n, imbalance: a_n });
    }
    let x = BinomialSpec::new((n as i64 + a_n) as u64, q0)?;
    let y = BinomialSpec::new((n as i64 - a_n) as u64, q1)?;
    if 2 * n > MAX_EXACT_TRIALS {
        return Err(OracleError::TooLarge(2 * n));
    }
    let need = threshold.ceil();
    let exact = if need <= 0.0 {
        1.0
    } else if need > (2 * n) as f64 {
        0.0
    } else {
        let need = need as u64;
        let px = x.pmf_vec();
        let sy = y.survival_vec();
        let total: KahanSum = px
            .iter()
            .enumerate()
            .map(|(xv, &w)| {
                let m = need.saturating_sub(xv as u64);
                if m > y.trials {
                    0.0
                } else {
                    w * sy[m as usize]
                }
            })
            .collect();
        total.total().clamp(0.0, 1.0)
    };

    let (nx, ny) = (x.trials as f64, y.trials as f64);
    let cgf = |s: f64| nx * ln_bernoulli_mgf(q0, s) + ny * ln_bernoulli_mgf(q1, s);
    let mean = x.mean() + y.mean();
    let (side, analytic) = if threshold >= mean {
        let log_bound = minimize_convex(|s| cgf(s) - s * threshold);
        (BoundSide::Upper, log_bound.exp().min(1.0))
    } else {
        let log_bound = minimize_convex(|s| cgf(-s) + s * threshold);
        (BoundSide::Lower, (-log_bound.exp_m1()).max(0.0))
    };
    Ok(ChernoffCheck {
        exact_tail: exact,
        analytic_bound: analytic,
        side,
        mean,
    })
}

/// Closed form of the tilted bound for `S ~ Bin(trials, q)` and
/// `t >= trials q`: `exp(-trials D(t / trials || q))`.
pub fn homogeneous_chernoff_bound(trials: u64, q: f64, threshold: f64) -> f64 {
    let n = trials as f64;
    let frac = (threshold / n).clamp(0.0, 1.0);
    (-n * binary_kl(frac, q)).exp()
}
