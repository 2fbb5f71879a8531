//! Trial orchestration and event-probability estimation.
//!
//! Trial `t` of a configuration always uses `SeedPath(master_seed, t, ·)`, so
//! results depend only on `(config, event, trials)`. Trials run on the current
//! rayon pool and are collected in trial order; success counting is
//! order-independent, so the worker count never changes any output.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{consensus_status, run_protocol, DynamicsError, ExperimentConfig, InitialState, Majority, Redraw, Trajectory};
use crate::rng::mix_into;

/// Normal quantile for a two-sided 95% interval.
pub const DEFAULT_Z: f64 = 1.96;

#[derive(Debug, Error, PartialEq)]
pub enum MonteCarloError {
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("wilson interval domain: successes={successes}, trials={trials}, z={z}")]
    IntervalDomain { successes: u64, trials: u64, z: f64 },
    #[error("stage statistics need at least 2 rounds, got {0}")]
    TooFewRounds(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// An event on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventSpec {
    Con(usize),
    MCon(usize),
    ZeroCountAtLeast { round: usize, threshold: u64 },
    ZeroCountAtMost { round: usize, threshold: u64 },
}

impl EventSpec {
    pub fn round(&self) -> usize {
        match *self {
            EventSpec::Con(r) | EventSpec::MCon(r) => r,
            EventSpec::ZeroCountAtLeast { round, .. } | EventSpec::ZeroCountAtMost { round, .. } => round,
        }
    }

    pub fn validate(&self, config: &ExperimentConfig) -> Result<(), MonteCarloError> {
        if self.round() > config.rounds {
            return Err(MonteCarloError::InvalidEvent(format!(
                "event round {} exceeds configured rounds {}",
                self.round(),
                config.rounds
            )));
        }
        match *self {
            EventSpec::ZeroCountAtLeast { threshold, .. } | EventSpec::ZeroCountAtMost { threshold, .. }
                if threshold > 2 * config.n =>
            {
                Err(MonteCarloError::InvalidEvent(format!(
                    "threshold {threshold} exceeds 2n = {}",
                    2 * config.n
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether the event occurred in `traj`. The round must be recorded.
    pub fn occurred(&self, traj: &Trajectory) -> bool {
        match *self {
            EventSpec::Con(r) => consensus_status(traj, r).map(|s| s.con).unwrap_or(false),
            EventSpec::MCon(r) => consensus_status(traj, r).map(|s| s.mcon).unwrap_or(false),
            EventSpec::ZeroCountAtLeast { round, threshold } => traj.zero_counts[round] >= threshold,
            EventSpec::ZeroCountAtMost { round, threshold } => traj.zero_counts[round] <= threshold,
        }
    }
}

impl fmt::Display for EventSpec {
    /// The command-line syntax: `con:r`, `mcon:r`, `ge:l:t`, `le:l:t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EventSpec::Con(r) => write!(f, "con:{r}"),
            EventSpec::MCon(r) => write!(f, "mcon:{r}"),
            EventSpec::ZeroCountAtLeast { round, threshold } => write!(f, "ge:{round}:{threshold}"),
            EventSpec::ZeroCountAtMost { round, threshold } => write!(f, "le:{round}:{threshold}"),
        }
    }
}

impl FromStr for EventSpec {
    type Err = MonteCarloError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MonteCarloError::InvalidEvent(format!("cannot parse {s:?}; expected con:r, mcon:r, ge:l:t or le:l:t"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            ["con", r] => Ok(EventSpec::Con(num(r)? as usize)),
            ["mcon", r] => Ok(EventSpec::MCon(num(r)? as usize)),
            ["ge", l, t] => Ok(EventSpec::ZeroCountAtLeast { round: num(l)? as usize, threshold: num(t)? }),
            ["le", l, t] => Ok(EventSpec::ZeroCountAtMost { round: num(l)? as usize, threshold: num(t)? }),
            _ => Err(bad()),
        }
    }
}

/// Wilson score interval for `successes / trials` at normal quantile `z`,
/// clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), MonteCarloError> {
    if trials == 0 || successes > trials || !(z.is_finite() && z > 0.0) {
        return Err(MonteCarloError::IntervalDomain { successes, trials, z });
    }
    let t = trials as f64;
    let p_hat = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p_hat + z2 / (2.0 * t)) / denom;
    let half = z / denom * (p_hat * (1.0 - p_hat) / t + z2 / (4.0 * t * t)).sqrt();
    let mut low = (centre - half).max(0.0);
    let mut high = (centre + half).min(1.0);
    // Boundary cases are exact; rounding must not move them off p_hat.
    if successes == 0 {
        low = 0.0;
    }
    if successes == trials {
        high = 1.0;
    }
    Ok((low.min(p_hat), high.max(p_hat)))
}

/// Result of estimating one event probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: u64,
    pub lambda: f64,
    pub xi: f64,
    pub rounds: usize,
    pub redraw: Redraw,
    pub event: String,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "n,lambda,xi,rounds,redraw,event,trials,successes,p_hat,ci_low,ci_high,master_seed";

    /// One CSV row; floats use Rust's shortest round-trip formatting.
    pub fn csv_row(&self) -> String {
        let redraw = match self.redraw {
            Redraw::EveryRound => "every",
            Redraw::FixedGraph => "fixed",
        };
        format!(
            "{},{:?},{:?},{},{},{},{},{},{:?},{:?},{:?},{}",
            self.n,
            self.lambda,
            self.xi,
            self.rounds,
            redraw,
            self.event,
            self.trials,
            self.successes,
            self.p_hat,
            self.ci_low,
            self.ci_high,
            self.master_seed
        )
    }

    /// Half-width of the confidence interval around `p_hat` on the low side.
    pub fn lower_half_width(&self) -> f64 {
        self.p_hat - self.ci_low
    }
}

/// Runs trials `0..trials` on the current rayon pool, returned in trial order.
pub fn run_trials(config: &ExperimentConfig, trials: u64) -> Result<Vec<Trajectory>, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    config.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|t| run_protocol(config, t).map_err(MonteCarloError::from))
        .collect()
}

/// Builds a report from already simulated trajectories.
pub fn estimate_from_trajectories(
    config: &ExperimentConfig,
    event: EventSpec,
    trajectories: &[Trajectory],
    z: f64,
) -> Result<EstimateReport, MonteCarloError> {
    event.validate(config)?;
    let trials = trajectories.len() as u64;
    let successes = trajectories.iter().filter(|t| event.occurred(t)).count() as u64;
    let (ci_low, ci_high) = wilson_interval(successes, trials, z)?;
    Ok(EstimateReport {
        n: config.n,
        lambda: config.lambda,
        xi: config.xi,
        rounds: config.rounds,
        redraw: config.redraw,
        event: event.to_string(),
        trials,
        successes,
        p_hat: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        master_seed: config.master_seed,
    })
}

pub fn estimate_event(config: &ExperimentConfig, event: EventSpec, trials: u64) -> Result<EstimateReport, MonteCarloError> {
    estimate_event_with_z(config, event, trials, DEFAULT_Z)
}

pub fn estimate_event_with_z(
    config: &ExperimentConfig,
    event: EventSpec,
    trials: u64,
    z: f64,
) -> Result<EstimateReport, MonteCarloError> {
    event.validate(config)?;
    let trajectories = run_trials(config, trials)?;
    estimate_from_trajectories(config, event, &trajectories, z)
}

/// Master seed used for `config` inside a sweep: the sweep seed mixed with
/// the configuration fingerprint, so distinct configurations get unrelated
/// streams while a repeated configuration reproduces its row.
pub fn sweep_seed(master_seed: u64, config: &ExperimentConfig) -> u64 {
    mix_into(master_seed, config.fingerprint())
}

/// Estimates `event` for each configuration in order.
pub fn trajectory_sweep(
    configs: &[ExperimentConfig],
    event: EventSpec,
    trials: u64,
) -> Result<Vec<EstimateReport>, MonteCarloError> {
    configs
        .iter()
        .map(|c| {
            let mut seeded = c.clone();
            seeded.master_seed = sweep_seed(c.master_seed, c);
            estimate_event(&seeded, event, trials)
        })
        .collect()
}

/// Summary of a sample of real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q10: quantile(&sorted, 0.10),
            q25: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.50),
            q75: quantile(&sorted, 0.75),
            q90: quantile(&sorted, 0.90),
        }
    }
}

/// Distribution of the imbalance `N(X_l; 0) - n` after round `l`, normalised
/// by `sqrt(n)`, `n^{3/4}` and `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundStatistics {
    pub round: usize,
    pub by_sqrt_n: Summary,
    pub by_n_three_quarters: Summary,
    pub by_n: Summary,
    /// `|N - n| / sqrt(n)`.
    pub abs_by_sqrt_n: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageStatistics {
    pub n: u64,
    pub trials: u64,
    pub rounds: Vec<RoundStatistics>,
}

pub fn imbalance(traj: &Trajectory, round: usize) -> f64 {
    traj.zero_counts[round] as f64 - traj.n() as f64
}

/// Stage statistics from simulated trajectories (rounds 0, 1 and 2).
pub fn stage_statistics_from(n: u64, trajectories: &[Trajectory]) -> StageStatistics {
    let nf = n as f64;
    let rounds = (0..=2)
        .map(|round| {
            let raw: Vec<f64> = trajectories.iter().map(|t| imbalance(t, round)).collect();
            let scaled = |s: f64| raw.iter().map(|x| x / s).collect::<Vec<_>>();
            RoundStatistics {
                round,
                by_sqrt_n: Summary::of(&scaled(nf.sqrt())),
                by_n_three_quarters: Summary::of(&scaled(nf.powf(0.75))),
                by_n: Summary::of(&scaled(nf)),
                abs_by_sqrt_n: Summary::of(&raw.iter().map(|x| x.abs() / nf.sqrt()).collect::<Vec<_>>()),
            }
        })
        .collect();
    StageStatistics {
        n,
        trials: trajectories.len() as u64,
        rounds,
    }
}

pub fn stage_statistics(config: &ExperimentConfig, trials: u64) -> Result<StageStatistics, MonteCarloError> {
    if config.rounds < 2 {
        return Err(MonteCarloError::TooFewRounds(config.rounds));
    }
    let trajectories = run_trials(config, trials)?;
    Ok(stage_statistics_from(config.n, &trajectories))
}

/// Keeps trajectories whose initial state had a strict zero majority.
pub fn zero_majority_only(trajectories: &[Trajectory]) -> Vec<Trajectory> {
    trajectories
        .iter()
        .filter(|t| t.initial_majority == Majority::Zeros)
        .cloned()
        .collect()
}

/// `config` with its initial state forced to `zeros` zeros.
pub fn forced(config: &ExperimentConfig, zeros: u64) -> ExperimentConfig {
    config.clone().with_initial(InitialState::Forced { zeros })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_parse_round_trip() {
        for s in ["con:3", "mcon:0", "ge:1:120", "le:2:0"] {
            assert_eq!(s.parse::<EventSpec>().unwrap().to_string(), s);
        }
        for bad in ["con", "con:x", "mcon:1:2", "gt:1:2", ""] {
            assert!(bad.parse::<EventSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn event_validation() {
        let cfg = ExperimentConfig::new(10, 1.0, 2, 0);
        assert!(EventSpec::Con(3).validate(&cfg).is_err());
        assert!(EventSpec::ZeroCountAtLeast { round: 1, threshold: 21 }.validate(&cfg).is_err());
        EventSpec::ZeroCountAtMost { round: 2, threshold: 20 }.validate(&cfg).unwrap();
    }

    #[test]
    fn wilson_boundaries() {
        let (lo, hi) = wilson_interval(0, 10, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1.0);
        let (lo, hi) = wilson_interval(10, 10, 1.96).unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
    }

    #[test]
    fn wilson_reference_values() {
        // mpmath, 50 digits (tests/data/reference_values.py).
        let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((lo - 0.403_829_828_590_147_15).abs() < 1e-14);
        assert!((hi - 0.596_170_171_409_852_85).abs() < 1e-14);
        let (lo, hi) = wilson_interval(3, 40, 1.96).unwrap();
        assert!((lo - 0.025_835_556_771_858_243).abs() < 1e-14);
        assert!((hi - 0.198_645_301_590_975_23).abs() < 1e-14);
    }

    #[test]
    fn wilson_domain_errors() {
        assert!(wilson_interval(0, 0, 1.96).is_err());
        assert!(wilson_interval(11, 10, 1.96).is_err());
        assert!(wilson_interval(1, 10, 0.0).is_err());
        assert!(wilson_interval(1, 10, f64::NAN).is_err());
    }

    #[test]
    fn con0_on_forced_unanimity() {
        let cfg = forced(&ExperimentConfig::new(20, 1.0, 1, 3), 40);
        let r = estimate_event(&cfg, EventSpec::Con(0), 17).unwrap();
        assert_eq!(r.successes, 17);
        assert_eq!(r.p_hat, 1.0);
    }

    #[test]
    fn no_trials_is_an_error() {
        let cfg = ExperimentConfig::new(20, 1.0, 1, 3);
        assert_eq!(estimate_event(&cfg, EventSpec::Con(1), 0).unwrap_err(), MonteCarloError::NoTrials);
    }

    #[test]
    fn empty_sweep() {
        assert!(trajectory_sweep(&[], EventSpec::Con(1), 5).unwrap().is_empty());
    }

    #[test]
    fn csv_row_shape() {
        let cfg = ExperimentConfig::new(20, 1.0, 2, 3);
        let r = estimate_event(&cfg, EventSpec::MCon(2), 4).unwrap();
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), EstimateReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("20,1.0,0.5,2,every,mcon:2,4,"));
    }

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        let s = Summary::of(&v);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.mean, 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
    }

    #[test]
    fn stage_statistics_needs_two_rounds() {
        let cfg = ExperimentConfig::new(20, 1.0, 1, 3);
        assert_eq!(stage_statistics(&cfg, 3).unwrap_err(), MonteCarloError::TooFewRounds(1));
    }

    #[test]
    fn stage_statistics_tie_and_unanimity() {
        let tie = forced(&ExperimentConfig::new(50, 1.0, 2, 1), 50);
        let s = stage_statistics(&tie, 10).unwrap();
        assert_eq!(s.rounds[0].by_sqrt_n.q10, 0.0);
        assert_eq!(s.rounds[0].by_sqrt_n.q90, 0.0);

        let all = forced(&ExperimentConfig::new(50, 1.0, 2, 1), 100);
        let s = stage_statistics(&all, 10).unwrap();
        for r in &s.rounds {
            assert_eq!(r.by_n.q10, 1.0);
            assert_eq!(r.by_n.q90, 1.0);
        }
    }
}
