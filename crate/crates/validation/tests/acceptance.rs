//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails. Every CSV is produced through the `mdl` command
//! line with a manifest, and criterion 10 replays each manifest under another
//! thread count.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use mdl_core::bounds::{c0, prop6_consensus_bound};
use mdl_core::verify::{self, Suite, VerifyOptions, LEMMA1_N0, LEMMA2_N0, PROP2_N0, PROP4_N0, PROP8_N0};
use mdl_core::wilson_interval;

const SEED: u64 = 20240601;
const Z: f64 = 1.96;

struct Acceptance {
    dir: PathBuf,
    /// Files written with a manifest and the exit code, in run order.
    manifested: Vec<(PathBuf, u8)>,
    failures: Vec<u32>,
}

/// Parsed CSV: header names and rows of fields.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Table {
        let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(str::to_string).collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Table { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn values(&self, name: &str) -> Vec<&str> {
        let i = self.col(name);
        self.rows.iter().map(|r| r[i].as_str()).collect()
    }

    fn floats(&self, name: &str) -> Vec<f64> {
        self.values(name).iter().map(|v| v.parse().unwrap()).collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    mdl_core::monte_carlo::quantile(&v, 0.5)
}

impl Acceptance {
    fn report(&mut self, k: u32, pass: bool, text: String) {
        println!("{} criterion {k}: {text}", if pass { "PASS" } else { "FAIL" });
        std::io::stdout().flush().ok();
        if !pass {
            self.failures.push(k);
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Runs `mdl --threads 1 --out <name> args...`; returns the output path
    /// and exit code.
    fn mdl(&mut self, name: &str, args: &[&str]) -> (PathBuf, u8) {
        let out = self.path(name);
        let _ = std::fs::remove_file(&out);
        let mut argv = vec!["mdl", "--threads", "1", "--out", out.to_str().unwrap()];
        argv.extend(args);
        let code = mdl_cli::run_from(argv);
        self.manifested.push((out.clone(), code));
        (out, code)
    }
}

fn criterion_1(acc: &mut Acceptance) {
    let opts = VerifyOptions { grid_size: 10_000, seed: SEED };
    let start = Instant::now();
    let rows = verify::pinsker(opts);
    let secs = start.elapsed().as_secs_f64();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let (path, code) = acc.mdl("pinsker.csv", &["verify", "--suite", "pinsker", "--grid-size", "10000", "--seed", &SEED.to_string()]);
    let cli_rows = Table::read(&path).rows.len();
    acc.report(
        1,
        failed == 0 && secs < 1.0 && code == 0 && cli_rows == rows.len(),
        format!("pinsker 10000 pairs, {} inequalities, {failed} failures, min margin {min_margin:.3e}, {secs:.3} s (< 1 s)", rows.len()),
    );
}

/// Runs a verify suite through the binary and summarises the rows.
fn suite_summary(acc: &mut Acceptance, suite: Suite) -> (bool, String) {
    let (path, code) = acc.mdl(&format!("{}.csv", suite.name()), &["verify", "--suite", suite.name()]);
    let table = Table::read(&path);
    let pass = table.values("pass");
    let failed = pass.iter().filter(|v| **v != "true").count();
    let min_margin = table.floats("margin").into_iter().fold(f64::INFINITY, f64::min);
    let lib_rows = verify::run_suite(suite, VerifyOptions::default()).map(|r| r.len()).unwrap_or(0);
    let ok = code == 0 && failed == 0 && !pass.is_empty() && lib_rows == pass.len();
    (ok, format!("{} {}/{} rows, min margin {min_margin:.3e}", suite.name(), pass.len() - failed, pass.len()))
}

fn criterion_2(acc: &mut Acceptance) {
    let (ok, text) = suite_summary(acc, Suite::Lemma1);
    acc.report(2, ok && LEMMA1_N0 <= 10_000, format!("{text}, threshold n0={LEMMA1_N0}"));
}

fn criterion_3(acc: &mut Acceptance) {
    let (ok2, t2) = suite_summary(acc, Suite::Prop2);
    let (ok4, t4) = suite_summary(acc, Suite::Prop4);
    acc.report(
        3,
        ok2 && ok4 && PROP2_N0 <= 2500 && PROP4_N0 <= 2500,
        format!("{t2} (n0={PROP2_N0}); {t4} (n0={PROP4_N0}); both own states"),
    );
}

fn criterion_4(acc: &mut Acceptance) {
    let (ok2, t2) = suite_summary(acc, Suite::Lemma2);
    let (ok8, t8) = suite_summary(acc, Suite::Prop8);
    acc.report(
        4,
        ok2 && ok8 && LEMMA2_N0 <= 10_000 && PROP8_N0 <= 10_000,
        format!("{t2} (n0={LEMMA2_N0}); {t8} (n0={PROP8_N0})"),
    );
}

fn criterion_5(acc: &mut Acceptance) {
    let (path, code) = acc.mdl("dynamics.csv", &["verify", "--suite", "dynamics", "--grid-size", "1000", "--seed", &SEED.to_string()]);
    let table = Table::read(&path);
    let failures: f64 = table.floats("oracle_value").iter().sum();
    let all_pass = table.values("pass").iter().all(|v| *v == "true");
    acc.report(
        5,
        code == 0 && all_pass && table.rows.len() == 1000 && failures == 0.0,
        format!(
            "{} instances: naive recomputation, relabel symmetry, absorption, permutation equivariance, {failures} failures",
            table.rows.len()
        ),
    );
}

fn criterion_6(acc: &mut Acceptance) {
    let (n, gamma) = (2500u64, 0.5);
    let zeros = n + (gamma * n as f64).ceil() as u64;
    let (path, code) = acc.mdl(
        "prop6.csv",
        &[
            "simulate", "--n", &n.to_string(), "--lambda", "1", "--xi", "0.5", "--rounds", "1", "--trials", "1000",
            "--seed", &SEED.to_string(), "--initial", &format!("zeros={zeros}"), "--event", &format!("ge:1:{}", 2 * n),
        ],
    );
    let table = Table::read(&path);
    let (p_hat, ci_low) = (table.floats("p_hat")[0], table.floats("ci_low")[0]);
    let bound = prop6_consensus_bound(n as f64, gamma, 1.0, 0.5).unwrap().value();
    let target = bound - (p_hat - ci_low);
    acc.report(
        6,
        code == 0 && p_hat >= target,
        format!("P(all zero after 1 round) = {p_hat:.4} [{ci_low:.4}, {:.4}] >= {bound:.4} - {:.4} = {target:.4}", table.floats("ci_high")[0], p_hat - ci_low),
    );
}

/// Per-trial zero counts from a trajectory CSV, in trial order.
fn trajectories(path: &Path) -> Vec<Vec<u64>> {
    let table = Table::read(path);
    let (rec, trial, zeros) = (table.col("record"), table.col("trial"), table.col("zeros_count"));
    let mut out: Vec<Vec<u64>> = Vec::new();
    for row in table.rows.iter().filter(|r| r[rec] == "round") {
        let t: usize = row[trial].parse().unwrap();
        if t == out.len() {
            out.push(Vec::new());
        }
        out[t].push(row[zeros].parse().unwrap());
    }
    out
}

fn criteria_7_to_9(acc: &mut Acceptance) {
    let n = 10_000u64;
    let trials = 500u64;
    let traj_path = acc.path("theorem_n1e4_trajectories.csv");
    let (path, code) = acc.mdl(
        "mcon3_n1e4.csv",
        &[
            "simulate", "--n", "1e4", "--lambda", "1", "--rounds", "3", "--trials", &trials.to_string(), "--seed",
            &SEED.to_string(), "--redraw", "every", "--initial", "coin", "--event", "mcon:3", "--trajectories",
            traj_path.to_str().unwrap(),
        ],
    );
    let est = Table::read(&path);
    let (p_hat, ci_low, ci_high) = (est.floats("p_hat")[0], est.floats("ci_low")[0], est.floats("ci_high")[0]);
    acc.report(
        7,
        code == 0 && p_hat >= 0.90 && ci_low >= 0.85,
        format!("P(MCon(3)) at n=1e4 = {p_hat:.3} [{ci_low:.3}, {ci_high:.3}], need >= 0.90 with lower bound >= 0.85"),
    );

    let runs = trajectories(&traj_path);
    let two_n = 2 * n;
    let con2 = |z: &Vec<u64>| z[2] == 0 || z[2] == two_n;
    let mut points: Vec<(u64, f64, f64, f64)> = Vec::new();
    let (sweep, sweep_code) = acc.mdl(
        "con2_sweep.csv",
        &["sweep", "--n", "400,1600,6400", "--lambda", "1", "--rounds", "2", "--trials", &trials.to_string(), "--seed", &SEED.to_string(), "--event", "con:2"],
    );
    let sweep = Table::read(&sweep);
    for (i, nv) in sweep.values("n").iter().enumerate() {
        points.push((nv.parse().unwrap(), sweep.floats("p_hat")[i], sweep.floats("ci_low")[i], sweep.floats("ci_high")[i]));
    }
    let successes = runs.iter().filter(|z| con2(z)).count() as u64;
    let (lo, hi) = wilson_interval(successes, runs.len() as u64, Z).unwrap();
    let p_big = successes as f64 / runs.len() as f64;
    points.push((n, p_big, lo, hi));
    let monotone = points.windows(2).all(|w| w[1].1 <= w[0].1 || w[1].2 <= w[0].3);
    let listing: Vec<String> = points.iter().map(|(n, p, lo, hi)| format!("n={n}: {p:.3} [{lo:.3}, {hi:.3}]")).collect();
    acc.report(
        8,
        code == 0 && sweep_code == 0 && runs.len() as u64 == trials && p_big <= 0.05 && monotone,
        format!("P(Con(2)) <= 0.05 at n=1e4 and non-increasing: {}", listing.join("; ")),
    );

    let nf = n as f64;
    let majority: Vec<&Vec<u64>> = runs.iter().filter(|z| z[0] > n).collect();
    let stage1: Vec<f64> = majority
        .iter()
        .map(|z| {
            let alpha = (z[0] as f64 - nf) / nf.sqrt();
            (z[1] as f64 - nf) / nf.powf(0.75) - c0(alpha, 1.0).unwrap()
        })
        .collect();
    let raw1 = median(majority.iter().map(|z| (z[1] as f64 - nf) / nf.powf(0.75)).collect());
    let c0_med = median(majority.iter().map(|z| c0((z[0] as f64 - nf) / nf.sqrt(), 1.0).unwrap()).collect());
    let m1 = median(stage1);
    let m2 = median(majority.iter().map(|z| (z[2] as f64 - nf) / nf).collect());
    acc.report(
        9,
        !majority.is_empty() && m1 > 0.0 && m2 > 0.0,
        format!(
            "{} zero-majority starts: median[(N1-n)/n^0.75 - C0(alpha_hat,1)] = {m1:.4} (median (N1-n)/n^0.75 = {raw1:.4}, median C0 = {c0_med:.2e}); median (N2-n)/n = {m2:.4}",
            majority.len()
        ),
    );
}

/// Replays every manifest with a different thread count and compares bytes.
fn criterion_10(acc: &mut Acceptance) {
    let mut mismatches = Vec::new();
    let mut files = 0;
    for (out, first_code) in acc.manifested.clone() {
        let manifest_path = format!("{}.manifest.json", out.display());
        let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest_path).unwrap()).unwrap();
        let outputs: Vec<String> = manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        let before: Vec<Vec<u8>> = outputs.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let mut argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        let i = argv.iter().position(|a| a == "--threads").unwrap();
        argv[i + 1] = "4".into();
        let code = mdl_cli::run_from(std::iter::once("mdl".to_string()).chain(argv));
        for (p, old) in outputs.iter().zip(&before) {
            files += 1;
            if code != first_code || std::fs::read(p).unwrap() != *old {
                mismatches.push(p.clone());
            }
        }
    }
    acc.report(
        10,
        mismatches.is_empty() && files > 0,
        format!("{files} CSV outputs from {} manifests replayed with --threads 4 (first run --threads 1); mismatches: {mismatches:?}", acc.manifested.len()),
    );
}

fn main() -> ExitCode {
    std::env::remove_var("MDL_SEED");
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let mut acc = Acceptance { dir, manifested: Vec::new(), failures: Vec::new() };
    let start = Instant::now();
    criterion_1(&mut acc);
    criterion_2(&mut acc);
    criterion_3(&mut acc);
    criterion_4(&mut acc);
    criterion_5(&mut acc);
    criterion_6(&mut acc);
    criteria_7_to_9(&mut acc);
    criterion_10(&mut acc);
    println!(
        "acceptance: {}/10 criteria passed in {:.0} s; outputs in {}",
        10 - acc.failures.len(),
        start.elapsed().as_secs_f64(),
        acc.dir.display()
    );
    if acc.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {:?}", acc.failures);
        ExitCode::FAILURE
    }
}
