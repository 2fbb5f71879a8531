//! The simple majority protocol.
//!
//! In every round each agent looks at the opinions of its neighbours in that
//! round's graph and adopts `0` if strictly more neighbours hold `0`, `1` if
//! strictly more hold `1`, and keeps its own opinion on a tie (including the
//! isolated case `0 = 0`). The agent's own opinion is never counted as a
//! received message. All agents update synchronously from the previous state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{for_each_gnp_edge, sample_gnp, GraphError, GraphSample};
use crate::rng::{derive_stream, SeedPath, Stream};
use crate::special::round_half_up;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("agent count must be even and at least 2, got {0}")]
    InvalidAgentCount(usize),
    #[error("opinion counts must be non-negative with an even total, got zeros={zeros}, ones={ones}")]
    InvalidCounts { zeros: i64, ones: i64 },
    #[error("graph has {graph} vertices but the state has {state} agents")]
    SizeMismatch { graph: usize, state: usize },
    #[error("round {round} out of range, trajectory has {recorded} rounds")]
    RoundOutOfRange { round: usize, recorded: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Opinion {
    Zero = 0,
    One = 1,
}

impl Opinion {
    pub fn flipped(self) -> Self {
        match self {
            Opinion::Zero => Opinion::One,
            Opinion::One => Opinion::Zero,
        }
    }
}

/// The opinions of all `2n` agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpinionState {
    opinions: Vec<Opinion>,
}

impl OpinionState {
    pub fn from_opinions(opinions: Vec<Opinion>) -> Result<Self, DynamicsError> {
        if opinions.is_empty() || opinions.len() % 2 != 0 {
            return Err(DynamicsError::InvalidAgentCount(opinions.len()));
        }
        Ok(Self { opinions })
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bits(bits: &str) -> Result<Self, DynamicsError> {
        let opinions = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(Opinion::Zero),
                '1' => Ok(Opinion::One),
                _ => Err(DynamicsError::InvalidConfig(format!("not a bit: {c:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_opinions(opinions)
    }

    pub fn to_bits(&self) -> String {
        self.opinions
            .iter()
            .map(|o| if *o == Opinion::Zero { '0' } else { '1' })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    pub fn get(&self, agent: usize) -> Opinion {
        self.opinions[agent]
    }

    /// `N(x; 0)`.
    pub fn zeros(&self) -> usize {
        self.opinions.iter().filter(|&&o| o == Opinion::Zero).count()
    }

    pub fn ones(&self) -> usize {
        self.len() - self.zeros()
    }

    /// Every opinion inverted.
    pub fn flipped(&self) -> Self {
        Self {
            opinions: self.opinions.iter().map(|o| o.flipped()).collect(),
        }
    }

    /// Agent `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut opinions = self.opinions.clone();
        for (i, &target) in perm.iter().enumerate() {
            opinions[target] = self.opinions[i];
        }
        Self { opinions }
    }
}

/// Fair-coin initial state: 64 opinions per stream word, least significant
/// bit first, bit `0` meaning opinion `0`.
pub fn init_random_opinions(agents: usize, stream: &mut Stream) -> Result<OpinionState, DynamicsError> {
    if agents < 2 || agents % 2 != 0 {
        return Err(DynamicsError::InvalidAgentCount(agents));
    }
    let mut opinions = Vec::with_capacity(agents);
    while opinions.len() < agents {
        let word = stream.next_u64();
        let take = (agents - opinions.len()).min(64);
        opinions.extend((0..take).map(|b| {
            if (word >> b) & 1 == 0 {
                Opinion::Zero
            } else {
                Opinion::One
            }
        }));
    }
    Ok(OpinionState { opinions })
}

/// First `zeros` agents hold `0`, the remaining `ones` hold `1`.
pub fn force_initial(zeros: i64, ones: i64) -> Result<OpinionState, DynamicsError> {
    let total = zeros.checked_add(ones);
    match total {
        Some(t) if zeros >= 0 && ones >= 0 && t >= 2 && t % 2 == 0 => {}
        _ => return Err(DynamicsError::InvalidCounts { zeros, ones }),
    }
    let mut opinions = vec![Opinion::Zero; zeros as usize];
    opinions.resize((zeros + ones) as usize, Opinion::One);
    Ok(OpinionState { opinions })
}

/// Zeros count `n + round(scale * n^exponent)` for a `2n`-agent state, using
/// nearest-integer rounding with halves rounded up.
pub fn imbalanced_zeros(n: u64, scale: f64, exponent: f64) -> i64 {
    n as i64 + round_half_up(scale * (n as f64).powf(exponent))
}

#[inline]
fn decide(own: Opinion, zero_neighbours: u32, one_neighbours: u32) -> Opinion {
    use std::cmp::Ordering::*;
    match zero_neighbours.cmp(&one_neighbours) {
        Greater => Opinion::Zero,
        Less => Opinion::One,
        Equal => own,
    }
}

/// One synchronous majority round on `graph`.
pub fn smp_round(state: &OpinionState, graph: &GraphSample) -> Result<OpinionState, DynamicsError> {
    if graph.vertex_count() != state.len() {
        return Err(DynamicsError::SizeMismatch {
            graph: graph.vertex_count(),
            state: state.len(),
        });
    }
    let opinions = (0..state.len())
        .map(|i| {
            let zeros = graph
                .neighbors(i)
                .iter()
                .filter(|&&j| state.get(j as usize) == Opinion::Zero)
                .count() as u32;
            let ones = graph.degree(i) as u32 - zeros;
            decide(state.get(i), zeros, ones)
        })
        .collect();
    Ok(OpinionState { opinions })
}

/// Per-agent neighbour tallies for one round, filled from an edge stream.
struct Tally {
    zero_neighbours: Vec<u32>,
    degree: Vec<u32>,
}

impl Tally {
    fn new(agents: usize) -> Self {
        Self {
            zero_neighbours: vec![0; agents],
            degree: vec![0; agents],
        }
    }

    fn reset(&mut self) {
        self.zero_neighbours.fill(0);
        self.degree.fill(0);
    }

    fn apply(&self, state: &mut [Opinion]) {
        for (i, own) in state.iter_mut().enumerate() {
            let z = self.zero_neighbours[i];
            *own = decide(*own, z, self.degree[i] - z);
        }
    }
}

/// One round on a freshly sampled `G(agents, p)` graph without building
/// adjacency lists. Produces exactly `smp_round(state, sample_gnp(..))` for the
/// same stream.
fn smp_round_streamed(
    state: &mut [Opinion],
    p: f64,
    stream: &mut Stream,
    tally: &mut Tally,
) -> Result<(), DynamicsError> {
    tally.reset();
    {
        let Tally {
            zero_neighbours,
            degree,
        } = tally;
        let opinions: &[Opinion] = state;
        for_each_gnp_edge(opinions.len(), p, stream, |w, v| {
            let (w, v) = (w as usize, v as usize);
            degree[w] += 1;
            degree[v] += 1;
            zero_neighbours[w] += u32::from(opinions[v] == Opinion::Zero);
            zero_neighbours[v] += u32::from(opinions[w] == Opinion::Zero);
        })?;
    }
    tally.apply(state);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Redraw {
    /// A fresh graph before every round.
    #[serde(rename = "every")]
    EveryRound,
    /// One graph (drawn from round index 0) reused in all rounds.
    #[serde(rename = "fixed")]
    FixedGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    FairCoin,
    /// Exactly this many zeros (agents `0..zeros`), the rest ones.
    Forced { zeros: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Majority {
    Zeros,
    Ones,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalKind {
    AllZero,
    AllOne,
    Mixed,
}

/// All parameters of a protocol experiment. Agents number `2n`; the edge
/// probability of a round is `lambda / n^xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: u64,
    pub lambda: f64,
    pub xi: f64,
    pub rounds: usize,
    pub redraw: Redraw,
    /// Optional per-round exponent overriding `xi`, one entry per round.
    pub per_round_xi: Option<Vec<f64>>,
    pub initial: InitialState,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Constant `xi = 1/2`, fresh graph every round, fair-coin start.
    pub fn new(n: u64, lambda: f64, rounds: usize, master_seed: u64) -> Self {
        Self {
            n,
            lambda,
            xi: 0.5,
            rounds,
            redraw: Redraw::EveryRound,
            per_round_xi: None,
            initial: InitialState::FairCoin,
            master_seed,
        }
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_redraw(mut self, redraw: Redraw) -> Self {
        self.redraw = redraw;
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_per_round_xi(mut self, xis: Vec<f64>) -> Self {
        self.per_round_xi = Some(xis);
        self
    }

    pub fn agents(&self) -> usize {
        2 * self.n as usize
    }

    fn xi_ok(xi: f64) -> bool {
        (0.5..1.0).contains(&xi)
    }

    /// Edge probability of round `round` (0-based).
    pub fn edge_probability(&self, round: usize) -> f64 {
        let xi = match &self.per_round_xi {
            Some(xs) => xs.get(round).copied().unwrap_or(self.xi),
            None => self.xi,
        };
        self.lambda / (self.n as f64).powf(xi)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidConfig(m));
        if self.n == 0 || self.n > (u32::MAX / 2) as u64 {
            return bad(format!("n must be in [1, 2^31), got {}", self.n));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !Self::xi_ok(self.xi) {
            return bad(format!("xi must lie in [1/2, 1), got {}", self.xi));
        }
        if let Some(xs) = &self.per_round_xi {
            if xs.len() != self.rounds {
                return bad(format!(
                    "per_round_xi has {} entries for {} rounds",
                    xs.len(),
                    self.rounds
                ));
            }
            if let Some(x) = xs.iter().find(|x| !Self::xi_ok(**x)) {
                return bad(format!("per-round xi must lie in [1/2, 1), got {x}"));
            }
            if self.redraw == Redraw::FixedGraph {
                return bad("per_round_xi requires a fresh graph every round".into());
            }
        }
        for round in 0..self.rounds.max(1) {
            let p = self.edge_probability(round);
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("edge probability lambda/n^xi = {p} outside (0, 1]"));
            }
        }
        if let InitialState::Forced { zeros } = self.initial {
            if zeros > 2 * self.n {
                return bad(format!("forced zeros {zeros} exceeds 2n = {}", 2 * self.n));
            }
        }
        Ok(())
    }

    /// Initial state of trial `trial_index`.
    pub fn initial_state(&self, trial_index: u64) -> Result<OpinionState, DynamicsError> {
        match self.initial {
            InitialState::FairCoin => {
                let mut stream = derive_stream(SeedPath::initial_state(self.master_seed, trial_index));
                init_random_opinions(self.agents(), &mut stream)
            }
            InitialState::Forced { zeros } => {
                force_initial(zeros as i64, 2 * self.n as i64 - zeros as i64)
            }
        }
    }

    /// A stable 64-bit fingerprint of every field except the master seed.
    pub fn fingerprint(&self) -> u64 {
        use crate::rng::mix_into;
        let mut h = mix_into(0, self.n);
        h = mix_into(h, self.lambda.to_bits());
        h = mix_into(h, self.xi.to_bits());
        h = mix_into(h, self.rounds as u64);
        h = mix_into(h, self.redraw as u64);
        match self.initial {
            InitialState::FairCoin => h = mix_into(h, u64::MAX),
            InitialState::Forced { zeros } => h = mix_into(h, zeros),
        }
        if let Some(xs) = &self.per_round_xi {
            for x in xs {
                h = mix_into(h, x.to_bits());
            }
        }
        h
    }
}

/// Per-round zero counts of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub agents: u64,
    /// `N(x_l; 0)` for `l = 0..=rounds`.
    pub zero_counts: Vec<u64>,
    pub initial_majority: Majority,
    pub final_state_kind: FinalKind,
}

impl Trajectory {
    fn from_counts(agents: u64, zero_counts: Vec<u64>) -> Self {
        let n = agents / 2;
        let initial_majority = match zero_counts[0].cmp(&n) {
            std::cmp::Ordering::Greater => Majority::Zeros,
            std::cmp::Ordering::Less => Majority::Ones,
            std::cmp::Ordering::Equal => Majority::Tie,
        };
        let last = *zero_counts.last().expect("at least the initial count");
        let final_state_kind = if last == agents {
            FinalKind::AllZero
        } else if last == 0 {
            FinalKind::AllOne
        } else {
            FinalKind::Mixed
        };
        Self {
            agents,
            zero_counts,
            initial_majority,
            final_state_kind,
        }
    }

    pub fn rounds(&self) -> usize {
        self.zero_counts.len() - 1
    }

    pub fn n(&self) -> u64 {
        self.agents / 2
    }

    pub const CSV_HEADER: &'static str = "record,trial,round,zeros_count,initial_majority,final_state_kind";

    /// One `round` row per recorded round, then a `summary` row repeating the
    /// last round with the majority and final-state verdicts.
    pub fn csv_rows(&self, trial_index: u64) -> Vec<String> {
        let mut rows: Vec<String> = self
            .zero_counts
            .iter()
            .enumerate()
            .map(|(round, zeros)| format!("round,{trial_index},{round},{zeros},,"))
            .collect();
        rows.push(format!(
            "summary,{trial_index},{},{},{},{}",
            self.rounds(),
            self.zero_counts[self.rounds()],
            self.initial_majority.label(),
            self.final_state_kind.label()
        ));
        rows
    }
}

impl Majority {
    pub fn label(self) -> &'static str {
        match self {
            Majority::Zeros => "zeros",
            Majority::Ones => "ones",
            Majority::Tie => "tie",
        }
    }
}

impl FinalKind {
    pub fn label(self) -> &'static str {
        match self {
            FinalKind::AllZero => "all-zero",
            FinalKind::AllOne => "all-one",
            FinalKind::Mixed => "mixed",
        }
    }
}

/// Runs `config.rounds` rounds for one trial.
pub fn run_protocol(config: &ExperimentConfig, trial_index: u64) -> Result<Trajectory, DynamicsError> {
    config.validate()?;
    let mut state = config.initial_state(trial_index)?;
    let agents = state.len();
    let mut zero_counts = Vec::with_capacity(config.rounds + 1);
    zero_counts.push(state.zeros() as u64);

    match config.redraw {
        Redraw::EveryRound => {
            let mut tally = Tally::new(agents);
            let mut opinions = std::mem::take(&mut state.opinions);
            for round in 0..config.rounds {
                let zeros = zero_counts[round];
                // Unanimity is absorbing; skip the sampling work.
                if zeros != 0 && zeros != agents as u64 {
                    let path = SeedPath::new(config.master_seed, trial_index, round as u64);
                    let mut stream = derive_stream(path);
                    smp_round_streamed(&mut opinions, config.edge_probability(round), &mut stream, &mut tally)?;
                }
                zero_counts.push(opinions.iter().filter(|&&o| o == Opinion::Zero).count() as u64);
            }
        }
        Redraw::FixedGraph => {
            if config.rounds > 0 {
                let mut stream = derive_stream(SeedPath::new(config.master_seed, trial_index, 0));
                let graph = sample_gnp(agents, config.edge_probability(0), &mut stream)?;
                for _ in 0..config.rounds {
                    state = smp_round(&state, &graph)?;
                    zero_counts.push(state.zeros() as u64);
                }
            }
        }
    }
    Ok(Trajectory::from_counts(agents as u64, zero_counts))
}

/// Reference runner that materialises every round's graph and applies
/// [`smp_round`]. Slower than [`run_protocol`] and used to check it.
pub fn run_protocol_materialized(
    config: &ExperimentConfig,
    trial_index: u64,
) -> Result<(Trajectory, Vec<GraphSample>), DynamicsError> {
    config.validate()?;
    let mut state = config.initial_state(trial_index)?;
    let agents = state.len();
    let mut zero_counts = vec![state.zeros() as u64];
    let mut graphs: Vec<GraphSample> = Vec::new();
    for round in 0..config.rounds {
        let graph = match config.redraw {
            Redraw::FixedGraph if round > 0 => graphs[0].clone(),
            Redraw::FixedGraph => {
                sample_gnp(agents, config.edge_probability(0), &mut derive_stream(SeedPath::new(config.master_seed, trial_index, 0)))?
            }
            Redraw::EveryRound => {
                let path = SeedPath::new(config.master_seed, trial_index, round as u64);
                sample_gnp(agents, config.edge_probability(round), &mut derive_stream(path))?
            }
        };
        state = smp_round(&state, &graph)?;
        zero_counts.push(state.zeros() as u64);
        graphs.push(graph);
    }
    Ok((Trajectory::from_counts(agents as u64, zero_counts), graphs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusStatus {
    pub con: bool,
    pub mcon: bool,
}

/// `Con(r)` and `MCon(r)` for a recorded trajectory.
pub fn consensus_status(traj: &Trajectory, round: usize) -> Result<ConsensusStatus, DynamicsError> {
    let zeros = *traj.zero_counts.get(round).ok_or(DynamicsError::RoundOutOfRange {
        round,
        recorded: traj.rounds(),
    })?;
    let all_zero = zeros == traj.agents;
    let all_one = zeros == 0;
    let con = all_zero || all_one;
    let mcon = match traj.initial_majority {
        Majority::Zeros => all_zero,
        Majority::Ones => all_one,
        Majority::Tie => con,
    };
    Ok(ConsensusStatus { con, mcon })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(bits: &str) -> OpinionState {
        OpinionState::from_bits(bits).unwrap()
    }

    #[test]
    fn complete_triangle_example() {
        // Odd agent counts are outside OpinionState, so exercise the rule on a
        // triangle plus an isolated fourth agent holding 1.
        let g = GraphSample::from_edges(4, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let out = smp_round(&st("0011"), &g).unwrap();
        assert_eq!(out.to_bits(), "0001");
    }

    #[test]
    fn empty_graph_keeps_everything() {
        let g = GraphSample::empty(6).unwrap();
        let s = st("010110");
        assert_eq!(smp_round(&s, &g).unwrap(), s);
    }

    #[test]
    fn star_example() {
        // Centre 0 holds 1, leaves 1 and 2 hold 0, agent 3 isolated.
        let g = GraphSample::from_edges(4, [(0, 1), (0, 2)]).unwrap();
        let out = smp_round(&st("1000"), &g).unwrap();
        assert_eq!(out.to_bits(), "0110");
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = GraphSample::empty(4).unwrap();
        assert_eq!(
            smp_round(&st("01"), &g).unwrap_err(),
            DynamicsError::SizeMismatch { graph: 4, state: 2 }
        );
    }

    #[test]
    fn force_initial_examples() {
        assert_eq!(force_initial(3, 1).unwrap().to_bits(), "0001");
        assert_eq!(force_initial(0, 4).unwrap().to_bits(), "1111");
        assert_eq!(imbalanced_zeros(100, 1.0, 0.5), 110);
        assert!(force_initial(-1, 3).is_err());
        assert!(force_initial(2, 1).is_err());
        assert!(force_initial(0, 0).is_err());
    }

    #[test]
    fn init_rejects_odd_or_zero() {
        let mut s = derive_stream(SeedPath::new(0, 0, 0));
        assert!(init_random_opinions(0, &mut s).is_err());
        assert!(init_random_opinions(3, &mut s).is_err());
        assert_eq!(init_random_opinions(130, &mut s).unwrap().len(), 130);
    }

    #[test]
    fn two_agents_cover_support() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..64 {
            let mut s = derive_stream(SeedPath::initial_state(seed, 0));
            seen.insert(init_random_opinions(2, &mut s).unwrap().to_bits());
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn zero_rounds() {
        let cfg = ExperimentConfig::new(10, 1.0, 0, 1).with_initial(InitialState::Forced { zeros: 20 });
        let t = run_protocol(&cfg, 0).unwrap();
        assert_eq!(t.zero_counts, vec![20]);
        assert_eq!(t.final_state_kind, FinalKind::AllZero);
        assert_eq!(t.initial_majority, Majority::Zeros);
    }

    #[test]
    fn unanimity_absorbs() {
        for redraw in [Redraw::EveryRound, Redraw::FixedGraph] {
            let cfg = ExperimentConfig::new(50, 2.0, 3, 4)
                .with_initial(InitialState::Forced { zeros: 100 })
                .with_redraw(redraw);
            let t = run_protocol(&cfg, 7).unwrap();
            assert_eq!(t.zero_counts, vec![100; 4]);
        }
    }

    #[test]
    fn streamed_runner_matches_materialized() {
        for (n, lambda, seed) in [(20u64, 1.0, 1u64), (50, 2.0, 2), (8, 0.5, 3), (100, 1.0, 4)] {
            for trial in 0..5 {
                let cfg = ExperimentConfig::new(n, lambda, 4, seed);
                let fast = run_protocol(&cfg, trial).unwrap();
                let (slow, _) = run_protocol_materialized(&cfg, trial).unwrap();
                assert_eq!(fast, slow, "n={n} trial={trial}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(100, 1.0, 3, 0);
        ok.validate().unwrap();
        assert!(ok.clone().with_xi(0.4).validate().is_err());
        assert!(ok.clone().with_xi(1.0).validate().is_err());
        // p = 20 / 10 > 1
        assert!(ExperimentConfig::new(100, 20.0, 3, 0).validate().is_err());
        assert!(ok.clone().with_initial(InitialState::Forced { zeros: 201 }).validate().is_err());
        assert!(ok.clone().with_per_round_xi(vec![0.5, 0.5]).validate().is_err());
        ok.clone().with_per_round_xi(vec![0.5, 0.5, 0.75]).validate().unwrap();
        assert!(ok
            .clone()
            .with_per_round_xi(vec![0.5, 0.5, 0.75])
            .with_redraw(Redraw::FixedGraph)
            .validate()
            .is_err());
    }

    #[test]
    fn per_round_xi_changes_probability() {
        let cfg = ExperimentConfig::new(10_000, 1.0, 3, 0).with_per_round_xi(vec![0.5, 0.5, 0.75]);
        assert!((cfg.edge_probability(0) - 0.01).abs() < 1e-15);
        assert!((cfg.edge_probability(2) - 0.001).abs() < 1e-15);
    }

    #[test]
    fn consensus_examples() {
        let t = Trajectory::from_counts(10, vec![6, 10]);
        assert_eq!(consensus_status(&t, 1).unwrap(), ConsensusStatus { con: true, mcon: true });
        assert_eq!(consensus_status(&t, 0).unwrap(), ConsensusStatus { con: false, mcon: false });

        let t = Trajectory::from_counts(10, vec![6, 0]);
        assert_eq!(consensus_status(&t, 1).unwrap(), ConsensusStatus { con: true, mcon: false });

        let t = Trajectory::from_counts(10, vec![5, 0]);
        assert_eq!(t.initial_majority, Majority::Tie);
        assert_eq!(consensus_status(&t, 1).unwrap(), ConsensusStatus { con: true, mcon: true });

        assert_eq!(
            consensus_status(&t, 2).unwrap_err(),
            DynamicsError::RoundOutOfRange { round: 2, recorded: 1 }
        );
    }

    #[test]
    fn fingerprint_ignores_seed_only() {
        let a = ExperimentConfig::new(100, 1.0, 3, 1);
        let b = ExperimentConfig::new(100, 1.0, 3, 2);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), a.clone().with_xi(0.6).fingerprint());
        assert_ne!(a.fingerprint(), ExperimentConfig::new(400, 1.0, 3, 1).fingerprint());
    }
}
