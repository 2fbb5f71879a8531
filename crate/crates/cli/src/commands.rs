use mdl_core::bounds::{
    alpha_report, c0_report, c1_report, lemma1_collision_lower, lemma2_collision_upper, prop3_success_bound,
    prop5_success_bound, prop6_consensus_bound, prop7_overshoot_bound, prop8_update_upper, prop9_consensus_upper,
    theorem2_total_bound, BoundReport, BoundsError,
};
use mdl_core::dynamics::{ExperimentConfig, InitialState, Redraw, Trajectory};
use mdl_core::monte_carlo::{
    estimate_from_trajectories, run_trials, stage_statistics_from, sweep_seed, EstimateReport, EventSpec, Summary,
};
use mdl_core::verify::{run_suite, CheckRow, Suite, VerifyOptions};
use serde::Serialize;

use crate::grid::{parse_count, parse_count_grid, parse_grid, parse_number};
use crate::output::{render, Sink};
use crate::{BoundsArgs, Cli, CliError, Command, ExperimentArgs, RedrawArg, SimulateArgs, SweepArgs, VerifyArgs, Which};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => simulate(cli, args),
        Command::Bounds(args) => bounds(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Sweep(args) => sweep(cli, args),
    }
}

fn parse_initial(spec: &str, n: u64) -> Result<InitialState, CliError> {
    if spec == "coin" {
        return Ok(InitialState::FairCoin);
    }
    let zeros = spec
        .strip_prefix("zeros=")
        .ok_or_else(|| CliError::flag("initial", format!("expected coin or zeros=K, got {spec:?}")))?;
    let zeros = parse_count(zeros).map_err(|e| CliError::flag("initial", e))?;
    if zeros > 2 * n {
        return Err(CliError::flag("initial", format!("zeros={zeros} exceeds the 2n = {} agents", 2 * n)));
    }
    Ok(InitialState::Forced { zeros })
}

fn build_config(n: u64, exp: &ExperimentArgs) -> Result<(ExperimentConfig, EventSpec), CliError> {
    if n == 0 {
        return Err(CliError::flag("n", "must be at least 1"));
    }
    if !(exp.lambda.is_finite() && exp.lambda > 0.0) {
        return Err(CliError::flag("lambda", format!("must be positive, got {}", exp.lambda)));
    }
    if !(0.5..1.0).contains(&exp.xi) {
        return Err(CliError::flag("xi", format!("must lie in [1/2, 1), got {}", exp.xi)));
    }
    if exp.trials == 0 {
        return Err(CliError::flag("trials", "must be at least 1"));
    }
    if !(exp.z.is_finite() && exp.z > 0.0) {
        return Err(CliError::flag("z", format!("must be positive, got {}", exp.z)));
    }
    let mut config = ExperimentConfig::new(n, exp.lambda, exp.rounds, exp.seed)
        .with_xi(exp.xi)
        .with_initial(parse_initial(&exp.initial, n)?)
        .with_redraw(match exp.redraw {
            RedrawArg::Every => Redraw::EveryRound,
            RedrawArg::Fixed => Redraw::FixedGraph,
        });
    if let Some(list) = &exp.per_round_xi {
        let xis = list
            .split(',')
            .map(parse_number)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::flag("per-round-xi", e))?;
        if xis.len() != exp.rounds {
            return Err(CliError::flag(
                "per-round-xi",
                format!("has {} entries but --rounds is {}", xis.len(), exp.rounds),
            ));
        }
        if let Some(bad) = xis.iter().find(|x| !(0.5..1.0).contains(*x)) {
            return Err(CliError::flag("per-round-xi", format!("entries must lie in [1/2, 1), got {bad}")));
        }
        if exp.redraw == RedrawArg::Fixed {
            return Err(CliError::flag("per-round-xi", "cannot be combined with --redraw fixed"));
        }
        config = config.with_per_round_xi(xis);
    }
    for round in 0..exp.rounds.max(1) {
        let p = config.edge_probability(round);
        if p > 1.0 {
            return Err(CliError::flag(
                "lambda",
                format!("edge probability lambda / n^xi = {p} exceeds 1 at n = {n}"),
            ));
        }
    }
    let event: EventSpec = exp.event.parse().map_err(|e| CliError::flag("event", e))?;
    event.validate(&config).map_err(|e| CliError::flag("event", e))?;
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((config, event))
}

fn simulate_trajectories(config: &ExperimentConfig, trials: u64) -> Result<Vec<Trajectory>, CliError> {
    run_trials(config, trials).map_err(|e| CliError::Runtime(e.to_string()))
}

fn estimate(
    config: &ExperimentConfig,
    event: EventSpec,
    trajectories: &[Trajectory],
    z: f64,
) -> Result<EstimateReport, CliError> {
    estimate_from_trajectories(config, event, trajectories, z).map_err(|e| CliError::Runtime(e.to_string()))
}

#[derive(Serialize)]
struct StageRow {
    round: usize,
    scale: &'static str,
    #[serde(flatten)]
    summary: Summary,
}

const STAGE_HEADER: &str = "round,scale,mean,q10,q25,median,q75,q90";

fn stage_csv(row: &StageRow) -> String {
    let s = &row.summary;
    format!(
        "{},{},{:?},{:?},{:?},{:?},{:?},{:?}",
        row.round, row.scale, s.mean, s.q10, s.q25, s.median, s.q75, s.q90
    )
}

const TRAJECTORY_HEADER: &str = Trajectory::CSV_HEADER;

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let n = parse_count(&args.n).map_err(|e| CliError::flag("n", e))?;
    let (config, event) = build_config(n, &args.experiment)?;
    if args.stages.is_some() && config.rounds < 2 {
        return Err(CliError::flag("stages", "needs --rounds of at least 2"));
    }
    let trajectories = simulate_trajectories(&config, args.experiment.trials)?;
    let report = estimate(&config, event, &trajectories, args.experiment.z)?;

    let mut sink = Sink::new(cli, Some(config.master_seed));
    sink.primary(&render(cli.format, EstimateReport::CSV_HEADER, &[report], EstimateReport::csv_row)?)?;
    if let Some(path) = &args.trajectories {
        let mut body = String::from(TRAJECTORY_HEADER);
        body.push('\n');
        for (trial, t) in trajectories.iter().enumerate() {
            for row in t.csv_rows(trial as u64) {
                body.push_str(&row);
                body.push('\n');
            }
        }
        sink.extra(path, &body)?;
    }
    if let Some(path) = &args.stages {
        let stats = stage_statistics_from(config.n, &trajectories);
        let rows: Vec<StageRow> = stats
            .rounds
            .into_iter()
            .flat_map(|r| {
                [
                    StageRow { round: r.round, scale: "sqrt_n", summary: r.by_sqrt_n },
                    StageRow { round: r.round, scale: "n_three_quarters", summary: r.by_n_three_quarters },
                    StageRow { round: r.round, scale: "n", summary: r.by_n },
                    StageRow { round: r.round, scale: "abs_sqrt_n", summary: r.abs_by_sqrt_n },
                ]
            })
            .collect();
        sink.extra(path, &render(crate::Format::Csv, STAGE_HEADER, &rows, stage_csv)?)?;
    }
    sink.finish()
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<(), CliError> {
    let ns = parse_count_grid(&args.n).map_err(|e| CliError::flag("n", e))?;
    let mut reports = Vec::with_capacity(ns.len());
    for n in ns {
        let (mut config, event) = build_config(n, &args.experiment)?;
        config.master_seed = sweep_seed(config.master_seed, &config);
        let trajectories = simulate_trajectories(&config, args.experiment.trials)?;
        reports.push(estimate(&config, event, &trajectories, args.experiment.z)?);
    }
    let mut sink = Sink::new(cli, Some(args.experiment.seed));
    sink.primary(&render(cli.format, EstimateReport::CSV_HEADER, &reports, EstimateReport::csv_row)?)?;
    sink.finish()
}

fn need<T: Copy>(value: Option<T>, flag: &str, which: Which) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::flag(flag, format!("is required for --which {}", which_name(which))))
}

fn which_name(which: Which) -> &'static str {
    match which {
        Which::C0 => "c0",
        Which::C1 => "c1",
        Which::Alpha => "alpha",
        Which::Prop3 => "prop3",
        Which::Prop5 => "prop5",
        Which::Prop6 => "prop6",
        Which::Prop7 => "prop7",
        Which::Prop8 => "prop8",
        Which::Prop9 => "prop9",
        Which::Lemma1 => "lemma1",
        Which::Lemma2 => "lemma2",
        Which::Thm2 => "thm2",
    }
}

fn one_bound(args: &BoundsArgs, n: Option<f64>) -> Result<BoundReport, CliError> {
    let w = args.which;
    let n_req = || n.ok_or_else(|| CliError::flag("n", format!("is required for --which {}", which_name(w))));
    let lambda = || need(args.lambda, "lambda", w);
    let result: Result<BoundReport, BoundsError> = match w {
        Which::C0 => c0_report(need(args.alpha, "alpha", w)?, lambda()?, n),
        Which::C1 => c1_report(need(args.beta, "beta", w)?, lambda()?),
        Which::Alpha => alpha_report(need(args.epsilon, "epsilon", w)?),
        Which::Prop3 => prop3_success_bound(n_req()?, need(args.alpha, "alpha", w)?, lambda()?),
        Which::Prop5 => prop5_success_bound(n_req()?, need(args.beta, "beta", w)?, lambda()?),
        Which::Prop6 => prop6_consensus_bound(n_req()?, need(args.gamma, "gamma", w)?, lambda()?, args.xi),
        Which::Prop7 => prop7_overshoot_bound(n_req()?, need(args.bn, "bn", w)?, need(args.pn, "pn", w)?),
        Which::Prop8 => prop8_update_upper(n_req()?, need(args.psin, "psin", w)?, lambda()?, args.theta),
        Which::Prop9 => prop9_consensus_upper(n_req()?, need(args.cn, "cn", w)?, lambda()?),
        Which::Lemma1 => lemma1_collision_lower(n_req()?, lambda()?, need(args.i, "i", w)?),
        Which::Lemma2 => lemma2_collision_upper(n_req()?, need(args.psin, "psin", w)?, lambda()?, args.theta),
        Which::Thm2 => theorem2_total_bound(
            n_req()?,
            lambda()?,
            need(args.rho, "rho", w)?,
            need(args.kappa, "kappa", w)?,
            args.theta,
        ),
    };
    result.map_err(|e| CliError::Usage(format!("--which {}: {e}", which_name(w))))
}

fn bounds(cli: &Cli, args: &BoundsArgs) -> Result<(), CliError> {
    let ns: Vec<Option<f64>> = match &args.n {
        Some(spec) => parse_grid(spec).map_err(|e| CliError::flag("n", e))?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let rows = ns.into_iter().map(|n| one_bound(args, n)).collect::<Result<Vec<_>, _>>()?;
    let mut sink = Sink::new(cli, None);
    sink.primary(&render(cli.format, BoundReport::CSV_HEADER, &rows, BoundReport::csv_row)?)?;
    sink.finish()
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(|e| CliError::flag("suite", e))?;
    if args.grid_size == 0 {
        return Err(CliError::flag("grid-size", "must be at least 1"));
    }
    let rows = run_suite(suite, VerifyOptions { grid_size: args.grid_size, seed: args.seed })
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut sink = Sink::new(cli, Some(args.seed));
    sink.primary(&render(cli.format, CheckRow::CSV_HEADER, &rows, CheckRow::csv_row)?)?;
    sink.finish()?;
    eprintln!("{suite}: {}/{} passed", rows.len() - failed, rows.len());
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
