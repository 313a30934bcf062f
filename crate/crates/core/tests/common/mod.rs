//! Fixtures and independent checks shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tep_core::instance::{builtin_garver, synthesize_grid, SynthesisConfig};
use tep_core::milp::{build_tep_model, BuildOptions, Model, Sense, VariableMap};
use tep_core::network::{ConductorParams, Network};
use tep_core::scenario::{enumerate_scenarios, realize_scenario, ScenarioCode, ScenarioConfig, ScenarioParams};

pub const SYNTHETIC_SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_network(name: &str) -> Network {
    tep_core::load_network(&fixture_text(name)).unwrap()
}

pub fn synthetic(seed: u64) -> Network {
    synthesize_grid(&SynthesisConfig {
        n_buses: 10,
        n_regions: 2,
        seed,
        ..Default::default()
    })
    .unwrap()
}

/// A network together with one realized scenario.
pub struct Case {
    pub label: String,
    pub net: Network,
    pub params: ScenarioParams,
}

impl Case {
    pub fn build(&self, vis: Option<usize>) -> (Model, VariableMap) {
        let opts = BuildOptions {
            valid_inequality_path_edges: vis,
            ..Default::default()
        };
        build_tep_model(&self.net, &self.params, &opts).unwrap()
    }
}

fn cases_for(label: &str, net: &Network, codes: &[ScenarioCode]) -> Vec<Case> {
    let cfg = ScenarioConfig::default();
    codes
        .iter()
        .map(|code| Case {
            label: format!("{label} {code}"),
            net: net.clone(),
            params: realize_scenario(code, net, &cfg).unwrap(),
        })
        .collect()
}

/// Garver under every scenario, ten seeded synthetic grids under their
/// all-low and all-high scenarios, and the bundled four-region grid under
/// its all-low and all-high scenarios.
pub fn oracle_cases() -> Vec<Case> {
    let mut out = Vec::new();
    let garver = builtin_garver();
    out.extend(cases_for("garver", &garver, &enumerate_scenarios(garver.regions.len())));
    for seed in SYNTHETIC_SEEDS {
        let net = synthetic(seed);
        let codes = enumerate_scenarios(net.regions.len());
        let ends = [codes[0].clone(), codes[codes.len() - 1].clone()];
        out.extend(cases_for(&format!("synthetic seed {seed}"), &net, &ends));
    }
    let four = fixture_network("synthetic_4region.json");
    let codes = enumerate_scenarios(four.regions.len());
    let ends = [codes[0].clone(), codes[codes.len() - 1].clone()];
    out.extend(cases_for("four-region fixture", &four, &ends));
    out
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn binary_vector(model: &Model, values: &[f64]) -> Vec<u8> {
    model
        .binary_indices()
        .iter()
        .map(|&j| (values[j] >= 0.5) as u8)
        .collect()
}

/// Largest bound or row violation of `values`, computed from the raw model
/// data without going through the model's own evaluators.
pub fn max_violation(model: &Model, values: &[f64], include_cuts: bool) -> f64 {
    let mut worst: f64 = 0.0;
    for (v, &x) in model.variables.iter().zip(values) {
        worst = worst.max(v.lower - x).max(x - v.upper);
    }
    let rows = model
        .constraints
        .iter()
        .chain(model.cuts.iter().filter(|_| include_cuts));
    for c in rows {
        let mut lhs = 0.0;
        for &(j, a) in &c.terms {
            lhs += a * values[j];
        }
        let v = match c.sense {
            Sense::Le => lhs - c.rhs,
            Sense::Ge => c.rhs - lhs,
            Sense::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(v);
    }
    worst
}

/// `Σ g − Σ γ·d` in per-unit, from the network data and the generator variables.
pub fn conservation_residual(net: &Network, params: &ScenarioParams, vars: &VariableMap, values: &[f64]) -> f64 {
    let generated: f64 = vars.gen.values().map(|&j| values[j]).sum();
    let demand: f64 = net
        .buses
        .iter()
        .map(|b| {
            let gamma = params
                .regions
                .iter()
                .find(|r| r.region_id == b.region_id)
                .unwrap()
                .gamma;
            gamma * b.demand_mw / net.base_mva
        })
        .sum();
    generated - demand
}

/// Straight transcription of the steady-state heat balance.
pub fn oracle_ampacity(c: &ConductorParams, t_amb_c: f64) -> Option<f64> {
    let pi = std::f64::consts::PI;
    let sigma = 5.670374419e-8;
    let tc = c.max_conductor_temp_c;
    let q_c = pi * c.heat_transfer_coeff * c.diameter_m * (tc - t_amb_c);
    let q_r = pi * c.emissivity * sigma * c.diameter_m * ((tc + 273.15).powi(4) - (t_amb_c + 273.15).powi(4));
    let q_s = c.solar_radiation * c.diameter_m * c.absorptivity;
    let r = (q_c + q_r - q_s) / c.resistance_ohm_per_m;
    (r > 0.0).then(|| r.sqrt())
}

pub fn random_conductor(rng: &mut ChaCha8Rng) -> ConductorParams {
    ConductorParams {
        diameter_m: rng.gen_range(0.01..0.045),
        resistance_ohm_per_m: rng.gen_range(2e-5..3e-4),
        emissivity: rng.gen_range(0.2..0.95),
        absorptivity: rng.gen_range(0.2..0.95),
        max_conductor_temp_c: rng.gen_range(60.0..120.0),
        heat_transfer_coeff: rng.gen_range(3.0..40.0),
        solar_radiation: rng.gen_range(0.0..1200.0),
    }
}

/// Normal equations solved in closed form.
pub fn oracle_ols(points: &[(i32, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0 as f64).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 as f64).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.0 as f64 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}
