//! Browser bindings. Each operation has a plain Rust function returning JSON
//! (tested natively) and a thin `#[wasm_bindgen]` wrapper that turns errors
//! into JS exceptions.

use mdl_core::bounds::{c0, prop3_success_bound};
use mdl_core::dynamics::{run_protocol, ExperimentConfig, Opinion};
use mdl_core::oracle::equal_split_update_prob;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `n` the page will simulate; keeps a click responsive.
pub const MAX_SIM_N: u64 = 20_000;
pub const MAX_TRIALS: u64 = 50;

#[derive(Debug, Serialize)]
pub struct SimulationOut {
    pub n: u64,
    pub lambda: f64,
    pub rounds: usize,
    pub seed: u64,
    /// Zero counts per round, one entry per trial.
    pub trials: Vec<Vec<u64>>,
    pub final_kinds: Vec<&'static str>,
}

/// Runs `trials` independent trajectories (trial indices `0..trials`).
pub fn simulate(n: u64, lambda: f64, rounds: usize, trials: u64, seed: u64) -> Result<SimulationOut, String> {
    if n == 0 || n > MAX_SIM_N {
        return Err(format!("n must lie in 1..={MAX_SIM_N}"));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let config = ExperimentConfig::new(n, lambda, rounds, seed);
    config.validate().map_err(|e| e.to_string())?;
    let runs = (0..trials)
        .map(|t| run_protocol(&config, t).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimulationOut {
        n,
        lambda,
        rounds,
        seed,
        final_kinds: runs.iter().map(|r| r.final_state_kind.label()).collect(),
        trials: runs.into_iter().map(|r| r.zero_counts).collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct UpdatePoint {
    pub alpha: f64,
    pub imbalance: i64,
    pub exact_own_zero: f64,
    pub exact_own_one: f64,
    pub lower_bound: f64,
}

/// Exact probability that an agent adopts 0 after one round from
/// `n + alpha sqrt(n)` zeros, against `1/2 + C0(alpha, lambda) / n^{1/4}`.
pub fn update_curve(n: u64, lambda: f64, alpha_max: f64, points: usize) -> Result<Vec<UpdatePoint>, String> {
    if !(2..=1000).contains(&points) {
        return Err("points must lie in 2..=1000".into());
    }
    if n < 2 || n > 1_000_000 {
        return Err("n must lie in 2..=1000000".into());
    }
    if !(alpha_max > 0.0 && alpha_max.is_finite()) {
        return Err("alpha_max must be positive".into());
    }
    let nf = n as f64;
    let p = lambda / nf.sqrt();
    (1..=points)
        .map(|k| {
            let alpha = alpha_max * k as f64 / points as f64;
            let imbalance = ((alpha * nf.sqrt()).round() as i64).min(n as i64);
            let zero = equal_split_update_prob(n, imbalance, p, Opinion::Zero).map_err(|e| e.to_string())?;
            let one = equal_split_update_prob(n, imbalance, p, Opinion::One).map_err(|e| e.to_string())?;
            let c = c0(alpha, lambda).map_err(|e| e.to_string())?;
            Ok(UpdatePoint {
                alpha,
                imbalance,
                exact_own_zero: zero.exact,
                exact_own_one: one.exact,
                lower_bound: 0.5 + c / nf.powf(0.25),
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct BoundPoint {
    pub n: f64,
    pub raw_value: f64,
    pub clamped: f64,
}

/// Round-one success bound over a log-spaced grid of n.
pub fn success_bound_curve(alpha: f64, lambda: f64, log10_min: f64, log10_max: f64, points: usize) -> Result<Vec<BoundPoint>, String> {
    if !(2..=1000).contains(&points) || !(log10_min < log10_max) || log10_min < 0.0 || log10_max > 300.0 {
        return Err("need 2..=1000 points and 0 <= log10_min < log10_max <= 300".into());
    }
    (0..points)
        .map(|k| {
            let n = 10f64.powf(log10_min + (log10_max - log10_min) * k as f64 / (points - 1) as f64);
            let report = prop3_success_bound(n, alpha, lambda).map_err(|e| e.to_string())?;
            Ok(BoundPoint {
                n,
                raw_value: report.raw_value,
                clamped: report.value(),
            })
        })
        .collect()
}

fn to_json<T: Serialize>(result: Result<T, String>) -> Result<String, JsValue> {
    result
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(n: u32, lambda: f64, rounds: u32, trials: u32, seed: u32) -> Result<String, JsValue> {
    to_json(simulate(n as u64, lambda, rounds as usize, trials as u64, seed as u64))
}

#[wasm_bindgen(js_name = updateCurve)]
pub fn update_curve_js(n: u32, lambda: f64, alpha_max: f64, points: u32) -> Result<String, JsValue> {
    to_json(update_curve(n as u64, lambda, alpha_max, points as usize))
}

#[wasm_bindgen(js_name = successBoundCurve)]
pub fn success_bound_curve_js(alpha: f64, lambda: f64, log10_min: f64, log10_max: f64, points: u32) -> Result<String, JsValue> {
    to_json(success_bound_curve(alpha, lambda, log10_min, log10_max, points as usize))
}
