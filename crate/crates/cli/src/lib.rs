//! The `mdl` command line: argument types and an in-process entry point.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod grid;
mod output;

#[derive(Debug, Parser, Serialize)]
#[command(name = "mdl", version, about = "Majority dynamics on per-round Erdős–Rényi graphs")]
pub struct Cli {
    /// Worker threads for trial-parallel work. Never changes output bytes.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the primary output here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[command(subcommand)]
    pub command: Command,
    /// Arguments as given, recorded in manifests.
    #[arg(skip)]
    #[serde(skip)]
    pub argv: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Estimate an event probability by Monte Carlo.
    Simulate(SimulateArgs),
    /// Evaluate a constant or bound, optionally over an n-grid.
    Bounds(BoundsArgs),
    /// Check bounds against the exact oracle.
    Verify(VerifyArgs),
    /// Estimate one event over a grid of n.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Bounds(_) => "bounds",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RedrawArg {
    Every,
    Fixed,
}

/// Parameters shared by `simulate` and `sweep`.
#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// Edge-probability scale: p = lambda / n^xi.
    #[arg(long)]
    pub lambda: f64,
    /// Edge-probability exponent in [1/2, 1).
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    /// Comma-separated exponent per round, overriding --xi.
    #[arg(long)]
    pub per_round_xi: Option<String>,
    #[arg(long)]
    pub rounds: usize,
    #[arg(long)]
    pub trials: u64,
    /// Master seed.
    #[arg(long, env = "MDL_SEED", default_value_t = 1)]
    pub seed: u64,
    /// con:r | mcon:r | ge:l:t | le:l:t
    #[arg(long)]
    pub event: String,
    #[arg(long, value_enum, default_value_t = RedrawArg::Every)]
    pub redraw: RedrawArg,
    /// coin | zeros=K
    #[arg(long, default_value = "coin")]
    pub initial: String,
    /// Normal quantile of the Wilson interval.
    #[arg(long, default_value_t = 1.96)]
    pub z: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Half the number of agents.
    #[arg(long)]
    pub n: String,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Also write per-round zero counts of every trial to this CSV file.
    #[arg(long)]
    pub trajectories: Option<String>,
    /// Also write round 0-2 imbalance summaries to this CSV file.
    #[arg(long)]
    pub stages: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Grid of n: v, v1,v2,..., a:b:log10 or a:b:step.
    #[arg(long)]
    pub n: String,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    C0,
    C1,
    Alpha,
    Prop3,
    Prop5,
    Prop6,
    Prop7,
    Prop8,
    Prop9,
    Lemma1,
    Lemma2,
    Thm2,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// n or a grid of n: v, v1,v2,..., a:b:log10 or a:b:step.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub bn: Option<f64>,
    #[arg(long)]
    pub pn: Option<f64>,
    #[arg(long)]
    pub psin: Option<f64>,
    #[arg(long)]
    pub cn: Option<f64>,
    #[arg(long, default_value_t = 6.0)]
    pub theta: f64,
    #[arg(long)]
    pub i: Option<u64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// pinsker | lemma1 | lemma2 | prop2 | prop4 | prop7 | prop8 | dynamics
    #[arg(long)]
    pub suite: String,
    /// Random cases for the pinsker and dynamics suites.
    #[arg(long, default_value_t = 1000)]
    pub grid_size: usize,
    #[arg(long, env = "MDL_SEED", default_value_t = 1)]
    pub seed: u64,
}

/// How a command failed.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flag values; exit code 2.
    Usage(String),
    /// I/O or other runtime failure; exit code 1.
    Runtime(String),
    /// Verification rows failed; exit code 1.
    ChecksFailed(usize),
}

impl CliError {
    pub fn flag(flag: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("--{flag}: {msg}"))
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 2 on invalid flags, 1 on failures.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    cli.argv = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let result = match cli.threads {
        Some(0) => Err(CliError::flag("threads", "must be at least 1")),
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| commands::run(&cli)),
            Err(e) => Err(CliError::Runtime(format!("--threads: {e}"))),
        },
        None => commands::run(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::ChecksFailed(count)) => {
            eprintln!("{count} check(s) failed");
            1
        }
    }
}
