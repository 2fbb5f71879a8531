//! Majority dynamics on Erdős–Rényi graphs redrawn every round: a
//! deterministic simulator, Monte Carlo estimators, closed-form bounds and an
//! exact binomial oracle to check them against.

pub mod bounds;
pub mod dynamics;
pub mod graph;
pub mod monte_carlo;
pub mod oracle;
pub mod rng;
pub mod special;
pub mod verify;

pub use dynamics::{
    consensus_status, run_protocol, smp_round, ExperimentConfig, InitialState, Opinion, OpinionState, Redraw,
    Trajectory,
};
pub use graph::{sample_gnp, GraphSample};
pub use monte_carlo::{estimate_event, wilson_interval, EstimateReport, EventSpec};
pub use rng::{derive_stream, SeedPath, Stream};
