//! Browser bindings: derating curves, temperature trend fits and Garver
//! scenario solves. Every function returns JSON or plain text.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tep_core::instance::builtin_garver;
use tep_core::network::ConductorParams;
use tep_core::report::{fit_report, solve_scenario, SweepOptions};
use tep_core::scenario::{ScenarioCode, ScenarioConfig};
use tep_core::thermal::{derating_factor, f_to_c, read_daily_tmax, top_k_mean_series, TmaxUnits};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    t_f: f64,
    eta: f64,
}

/// Capacity multiplier of a Drake conductor from `t_base_f` up to `t_max_f`,
/// sampled at `steps` evenly spaced temperatures.
#[wasm_bindgen]
pub fn derating_curve(t_base_f: f64, t_max_f: f64, steps: u32) -> Result<String, JsError> {
    if !(t_max_f >= t_base_f) || steps < 2 {
        return Err(JsError::new("need t_max >= t_base and at least 2 steps"));
    }
    let cond = ConductorParams::DRAKE;
    let points = (0..steps)
        .map(|i| {
            let t_f = t_base_f + (t_max_f - t_base_f) * i as f64 / (steps - 1) as f64;
            let eta = derating_factor(&cond, f_to_c(t_base_f), f_to_c(t_f)).map_err(js_err)?;
            Ok(CurvePoint { t_f, eta })
        })
        .collect::<Result<Vec<_>, JsError>>()?;
    serde_json::to_string(&points).map_err(js_err)
}

/// Trend report for a `STATION,DATE,TMAX` CSV in °F.
#[wasm_bindgen]
pub fn fit_temperature_trend(csv_text: &str, k: u32, base_year: i32) -> Result<String, JsError> {
    let daily = read_daily_tmax(csv_text.as_bytes(), TmaxUnits::Fahrenheit, None).map_err(js_err)?;
    let top = top_k_mean_series(&daily.records, k as usize).map_err(js_err)?;
    let report = fit_report(&top.series, base_year, &[2035, 2055, 2085]).map_err(js_err)?;
    Ok(report.render())
}

#[derive(Serialize)]
struct GarverResult {
    scenario: String,
    status: String,
    objective: f64,
    nodes: usize,
    built: Vec<String>,
    etas: Vec<f64>,
    new_line_cost: String,
    cap_exp_cost: String,
    gen_cost: String,
    total_cost: String,
}

/// Solves the built-in Garver case for a scenario code such as `L,H`.
#[wasm_bindgen]
pub fn solve_garver(code: &str, gamma_low: f64, gamma_high: f64, enable_vis: bool) -> Result<String, JsError> {
    let net = builtin_garver();
    let code: ScenarioCode = code.parse().map_err(js_err)?;
    let mut cfg = ScenarioConfig::default();
    cfg.elasticity.gamma_low = gamma_low;
    cfg.elasticity.gamma_high = gamma_high;
    if !cfg.elasticity.is_valid() {
        return Err(JsError::new("need 1 <= gamma_low <= gamma_high"));
    }
    let opts = SweepOptions {
        enable_vis,
        ..Default::default()
    };
    let (outcome, model, sol) = solve_scenario(&net, &cfg, &code, &opts).map_err(js_err)?;
    let built = model
        .binary_indices()
        .into_iter()
        .filter(|&j| sol.values.get(j).is_some_and(|&x| x >= 0.5))
        .map(|j| model.variables[j].name.clone())
        .collect();
    let money = |f: fn(&tep_core::report::SweepReportRow) -> tep_core::report::Cents| {
        outcome.row.as_ref().map(|r| f(r).to_string()).unwrap_or_default()
    };
    let result = GarverResult {
        scenario: code.to_string(),
        status: outcome.status_label(),
        objective: sol.objective,
        nodes: sol.stats.nodes,
        built,
        etas: outcome.params.regions.iter().map(|r| r.eta).collect(),
        new_line_cost: money(|r| r.new_line_cost),
        cap_exp_cost: money(|r| r.cap_exp_cost),
        gen_cost: money(|r| r.gen_cost),
        total_cost: money(|r| r.total_cost),
    };
    serde_json::to_string(&result).map_err(js_err)
}
