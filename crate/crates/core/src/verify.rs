//! Oracle-versus-bound verification suites.
//!
//! Each suite evaluates an inequality on a grid and returns one [`CheckRow`]
//! per grid point. `margin` is positive when the inequality holds with room
//! to spare, whichever direction it points. Several bounds are only claimed
//! "for all sufficiently large n"; the smallest `n` each suite evaluates is
//! recorded in the `*_N0` constants.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{
    binary_kl, c0, c1, lemma1_collision_lower, lemma2_collision_upper, pinsker_lower, prop7_overshoot_bound,
    prop8_update_upper, reverse_pinsker_upper, BoundsError,
};
use crate::dynamics::{smp_round, Opinion, OpinionState};
use crate::graph::{sample_gnp, GraphSample};
use crate::oracle::{chernoff_mgf_bound_check, collision_prob, collision_probs, equal_split_update_prob, OracleError};
use crate::rng::{derive_stream, SeedPath, Stream};
use crate::special::round_half_up;

// Thresholds found by scanning every n from 2 to 6000 on the default grids.
// Below them the grids either leave the domain (p_n > 1, empty counts) or a
// bound fails: the collision lower bound at n = 4, lambda = 2 and the
// n^{3/4}-scale update bound at n = 9, 10.

/// Smallest `n` at which the collision lower bound is evaluated.
pub const LEMMA1_N0: u64 = 5;
/// Smallest `n` at which the sqrt(n)-scale update lower bound is evaluated.
///
/// For `own = 1` and `alpha * lambda = 1/4` (grid point alpha = lambda = 1/2)
/// the leading-order advantage vanishes and the exact probability oscillates
/// around 1/2 with the rounding of `alpha sqrt(n)`; it is above the bound at
/// the grid sizes 400 and 2500, where `alpha sqrt(n)` is an integer, and
/// below it for many sizes in between. Every other grid point holds for all
/// `n >= 5`.
pub const PROP2_N0: u64 = 400;
/// Smallest `n` at which the n^{3/4}-scale update lower bound is evaluated.
pub const PROP4_N0: u64 = 11;
/// Smallest `n` at which the collision upper bound is evaluated.
pub const LEMMA2_N0: u64 = 4;
/// Smallest `n` at which the update upper bound is evaluated.
pub const PROP8_N0: u64 = 4;

/// `theta` used by the upper-bound suites.
pub const THETA: f64 = 6.0;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}` (expected one of: pinsker, lemma1, lemma2, prop2, prop4, prop7, prop8, dynamics)")]
    UnknownSuite(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("dynamics check failed to run: {0}")]
    Dynamics(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Pinsker,
    Lemma1,
    Lemma2,
    Prop2,
    Prop4,
    Prop7,
    Prop8,
    Dynamics,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Pinsker,
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Prop2,
        Suite::Prop4,
        Suite::Prop7,
        Suite::Prop8,
        Suite::Dynamics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pinsker => "pinsker",
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Prop2 => "prop2",
            Suite::Prop4 => "prop4",
            Suite::Prop7 => "prop7",
            Suite::Prop8 => "prop8",
            Suite::Dynamics => "dynamics",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub params: String,
    pub oracle_value: f64,
    pub bound_value: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    pub const CSV_HEADER: &'static str = "suite,params,oracle_value,bound_value,margin,pass";

    /// `oracle >= bound`.
    fn at_least(suite: Suite, params: String, oracle: f64, bound: f64) -> Self {
        let margin = oracle - bound;
        Self {
            suite: suite.name().to_string(),
            params,
            oracle_value: oracle,
            bound_value: bound,
            margin,
            pass: margin >= 0.0,
        }
    }

    /// `oracle <= bound`.
    fn at_most(suite: Suite, params: String, oracle: f64, bound: f64) -> Self {
        let margin = bound - oracle;
        Self {
            suite: suite.name().to_string(),
            params,
            oracle_value: oracle,
            bound_value: bound,
            margin,
            pass: margin >= 0.0,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{:?},{:?},{}",
            self.suite, self.params, self.oracle_value, self.bound_value, self.margin, self.pass
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Number of random cases for the randomised suites (`pinsker`, `dynamics`).
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { grid_size: 1000, seed: 1 }
    }
}

pub fn run_suite(suite: Suite, opts: VerifyOptions) -> Result<Vec<CheckRow>, VerifyError> {
    match suite {
        Suite::Pinsker => Ok(pinsker(opts)),
        Suite::Lemma1 => lemma1(&[400, 2500, 10_000], &[0.5, 1.0, 2.0]),
        Suite::Lemma2 => lemma2(&[100, 400, 1000, 2500, 10_000], &[1.0, 2.0]),
        Suite::Prop2 => prop2(&[400, 2500], &[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0]),
        Suite::Prop4 => prop4(&[400, 2500], &[0.25, 0.5, 1.0], &[0.5, 1.0, 2.0]),
        Suite::Prop7 => prop7(&[100, 400, 2500], &[0.5, 0.52, 0.55]),
        Suite::Prop8 => prop8(&[100, 400, 1000, 2500, 10_000], &[1.0, 2.0]),
        Suite::Dynamics => dynamics(opts),
    }
}

/// Random `(a, b)` with `a ~ U[0, 1]`, `b ~ U[0.05, 0.95]`; two rows per pair.
pub fn pinsker(opts: VerifyOptions) -> Vec<CheckRow> {
    let mut stream = derive_stream(SeedPath::new(opts.seed, 0, 0));
    let mut rows = Vec::with_capacity(2 * opts.grid_size);
    for _ in 0..opts.grid_size {
        let a = stream.next_f64();
        let b = 0.05 + 0.9 * stream.next_f64();
        let d = binary_kl(a, b);
        rows.push(CheckRow::at_least(Suite::Pinsker, format!("a={a:?};b={b:?};side=lower"), d, pinsker_lower(a, b)));
        rows.push(CheckRow::at_most(Suite::Pinsker, format!("a={a:?};b={b:?};side=upper"), d, reverse_pinsker_upper(a, b)));
    }
    rows
}

/// `collision_prob(n, lambda/sqrt(n), i) >= lemma1_collision_lower(n, lambda, i)`
/// for every `0 <= i <= lambda sqrt(n)`.
pub fn lemma1(ns: &[u64], lambdas: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns.iter().filter(|&&n| n >= LEMMA1_N0) {
        for &lambda in lambdas {
            let sqrt_n = (n as f64).sqrt();
            let max_i = (lambda * sqrt_n).floor() as u64;
            let exact = collision_probs(n, lambda / sqrt_n, max_i)?;
            for (i, &value) in exact.iter().enumerate() {
                let bound = lemma1_collision_lower(n as f64, lambda, i as u64)?.raw_value;
                rows.push(CheckRow::at_least(
                    Suite::Lemma1,
                    format!("n={n};lambda={lambda:?};i={i}"),
                    value,
                    bound,
                ));
            }
        }
    }
    Ok(rows)
}

/// `psi_n = ceil(sqrt(n log n))`, so that `psi_n p_n >= 1` at `lambda = 1`.
pub fn psi_for(n: u64) -> u64 {
    let x = n as f64;
    (x.sqrt() * x.ln().sqrt()).ceil() as u64
}

/// `collision_prob(n - psi_n, lambda/sqrt(n), 0) <= lemma2_collision_upper`.
pub fn lemma2(ns: &[u64], lambdas: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns.iter().filter(|&&n| n >= LEMMA2_N0) {
        let psi = psi_for(n);
        for &lambda in lambdas {
            let p = lambda / (n as f64).sqrt();
            let exact = collision_prob(n - psi, p, 0)?;
            let bound = lemma2_collision_upper(n as f64, psi as f64, lambda, THETA)?.raw_value;
            rows.push(CheckRow::at_most(
                Suite::Lemma2,
                format!("n={n};psi_n={psi};lambda={lambda:?};theta={THETA:?}"),
                exact,
                bound,
            ));
        }
    }
    Ok(rows)
}

fn update_rows(
    suite: Suite,
    n: u64,
    imbalance: i64,
    lambda: f64,
    label: String,
    bound: f64,
) -> Result<Vec<CheckRow>, VerifyError> {
    let p = lambda / (n as f64).sqrt();
    let mut rows = Vec::new();
    for own in [Opinion::Zero, Opinion::One] {
        let value = equal_split_update_prob(n, imbalance, p, own)?;
        let own_label = match own {
            Opinion::Zero => 0,
            Opinion::One => 1,
        };
        rows.push(CheckRow::at_least(
            suite,
            format!("n={n};{label};lambda={lambda:?};imbalance={imbalance};own={own_label}"),
            value.exact,
            bound,
        ));
    }
    Ok(rows)
}

/// Exact decide-0 probability from `n + round(alpha sqrt(n))` zeros is at least
/// `1/2 + C0(alpha, lambda) / n^{1/4}`, for both own opinions.
pub fn prop2(ns: &[u64], alphas: &[f64], lambdas: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns.iter().filter(|&&n| n >= PROP2_N0) {
        for &alpha in alphas {
            for &lambda in lambdas {
                let imbalance = round_half_up(alpha * (n as f64).sqrt());
                let bound = 0.5 + c0(alpha, lambda)? / (n as f64).powf(0.25);
                rows.extend(update_rows(Suite::Prop2, n, imbalance, lambda, format!("alpha={alpha:?}"), bound)?);
            }
        }
    }
    Ok(rows)
}

/// Exact decide-0 probability from `n + round(beta n^{3/4})` zeros is at least
/// `1/2 + C1(beta, lambda)`, for both own opinions.
pub fn prop4(ns: &[u64], betas: &[f64], lambdas: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns.iter().filter(|&&n| n >= PROP4_N0) {
        for &beta in betas {
            for &lambda in lambdas {
                let imbalance = round_half_up(beta * (n as f64).powf(0.75));
                let bound = 0.5 + c1(beta, lambda)?;
                rows.extend(update_rows(Suite::Prop4, n, imbalance, lambda, format!("beta={beta:?}"), bound)?);
            }
        }
    }
    Ok(rows)
}

/// Exact `P{Bin(2n, P) >= n + B}` against `exp(-2n D(1/2 + B/(2n) || P))`
/// for `B` from the mean upwards in steps of `sqrt(n)/2`.
pub fn prop7(ns: &[u64], ps: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns {
        let nf = n as f64;
        for &p in ps {
            let start = (2.0 * nf * p - nf).max(0.0).ceil();
            for k in 0..8 {
                let b = start + f64::from(k) * 0.5 * nf.sqrt();
                if b > nf {
                    break;
                }
                let exact = chernoff_mgf_bound_check(n, 0, p, p, nf + b)?.exact_tail;
                let bound = prop7_overshoot_bound(nf, b, p)?.raw_value;
                rows.push(CheckRow::at_most(Suite::Prop7, format!("n={n};b_n={b:?};p_n={p:?}"), exact, bound));
            }
        }
    }
    Ok(rows)
}

/// Exact decide-0 probability from `n + psi_n` zeros (own opinion 0, the
/// larger of the two) is at most the update upper bound.
pub fn prop8(ns: &[u64], lambdas: &[f64]) -> Result<Vec<CheckRow>, VerifyError> {
    let mut rows = Vec::new();
    for &n in ns.iter().filter(|&&n| n >= PROP8_N0) {
        let psi = psi_for(n);
        for &lambda in lambdas {
            let p = lambda / (n as f64).sqrt();
            let exact = equal_split_update_prob(n, psi as i64, p, Opinion::Zero)?.exact;
            let report = prop8_update_upper(n as f64, psi as f64, lambda, THETA)?;
            let mut row = CheckRow::at_most(
                Suite::Prop8,
                format!("n={n};psi_n={psi};lambda={lambda:?};theta={THETA:?};valid={}", report.valid),
                exact,
                report.raw_value,
            );
            row.pass &= report.valid;
            rows.push(row);
        }
    }
    Ok(rows)
}

fn uniform_below(stream: &mut Stream, bound: usize) -> usize {
    ((stream.next_f64() * bound as f64) as usize).min(bound - 1)
}

fn random_permutation(stream: &mut Stream, len: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        perm.swap(i, uniform_below(stream, i + 1));
    }
    perm
}

/// Majority update recomputed from the edge set alone.
fn naive_round(state: &OpinionState, graph: &GraphSample) -> OpinionState {
    let v = state.len();
    let next = (0..v)
        .map(|i| {
            let mut balance = 0i64;
            for j in (0..v).filter(|&j| j != i && graph.has_edge(i, j)) {
                balance += match state.get(j) {
                    Opinion::Zero => 1,
                    Opinion::One => -1,
                };
            }
            match balance {
                b if b > 0 => Opinion::Zero,
                b if b < 0 => Opinion::One,
                _ => state.get(i),
            }
        })
        .collect();
    OpinionState::from_opinions(next).expect("same length as input")
}

/// Random instances with `2 <= V <= 32` agents (even) and `p ~ U[0.1, 0.9]`.
/// Each row checks brute-force equivalence, 0/1 symmetry, absorption and
/// permutation equivariance; `oracle_value` counts the failed properties.
pub fn dynamics(opts: VerifyOptions) -> Result<Vec<CheckRow>, VerifyError> {
    let err = |e: &dyn fmt::Display| VerifyError::Dynamics(e.to_string());
    let mut rows = Vec::with_capacity(opts.grid_size);
    for case in 0..opts.grid_size as u64 {
        let mut stream = derive_stream(SeedPath::new(opts.seed, case, 1));
        let v = 2 * (1 + uniform_below(&mut stream, 16));
        let p = 0.1 + 0.8 * stream.next_f64();
        let opinions = (0..v)
            .map(|_| if stream.next_u64() & 1 == 0 { Opinion::Zero } else { Opinion::One })
            .collect();
        let state = OpinionState::from_opinions(opinions).map_err(|e| err(&e))?;
        let graph = sample_gnp(v, p, &mut stream).map_err(|e| err(&e))?;
        let next = smp_round(&state, &graph).map_err(|e| err(&e))?;

        let mut failures = 0u32;
        if next != naive_round(&state, &graph) {
            failures += 1;
        }
        if smp_round(&state.flipped(), &graph).map_err(|e| err(&e))? != next.flipped() {
            failures += 1;
        }
        let zeros = OpinionState::from_opinions(vec![Opinion::Zero; v]).map_err(|e| err(&e))?;
        let ones = zeros.flipped();
        if smp_round(&zeros, &graph).map_err(|e| err(&e))? != zeros
            || smp_round(&ones, &graph).map_err(|e| err(&e))? != ones
        {
            failures += 1;
        }
        let perm = random_permutation(&mut stream, v);
        let permuted_graph = graph.permuted(&perm).map_err(|e| err(&e))?;
        if smp_round(&state.permuted(&perm), &permuted_graph).map_err(|e| err(&e))? != next.permuted(&perm) {
            failures += 1;
        }
        rows.push(CheckRow::at_most(
            Suite::Dynamics,
            format!("case={case};agents={v};p={p:?};edges={}", graph.edge_count()),
            f64::from(failures),
            0.0,
        ));
    }
    Ok(rows)
}
