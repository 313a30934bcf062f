//! Scenario sweeps, cost reports and temperature-trend reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{build_tep_model, BuildError, BuildOptions, Model, VariableMap, DEFAULT_SIGMA_HOURS};
use crate::network::Network;
use crate::scenario::{
    enumerate_scenarios, realize_scenario, ScenarioCode, ScenarioConfig, ScenarioError, ScenarioParams,
};
use crate::solver::{solve_milp, Solution, SolveOptions, SolveStats, SolveStatus, SolverError};
use crate::thermal::{exceedance_trend, fit_trend, project_temperature, AnnualSeries, ThermalError, TrendFit};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A dollar amount held in whole cents so report sums are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Cents(pub i64);

impl Cents {
    pub fn from_dollars(d: f64) -> Self {
        Cents((d * 100.0).round() as i64)
    }

    pub fn dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// `$X.XXB`, rounded half away from zero on the cent count.
    pub fn billions(self) -> String {
        // 1e9 cents per $0.01B.
        let hundredths = (self.0 as f64 / 1e9).round() as i64;
        let sign = if hundredths < 0 { "-" } else { "" };
        let h = hundredths.abs();
        format!("{sign}${}.{:02}B", h / 100, h % 100)
    }
}

impl std::ops::Add for Cents {
    type Output = Cents;
    fn add(self, o: Cents) -> Cents {
        Cents(self.0 + o.0)
    }
}

impl std::fmt::Display for Cents {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let c = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", c / 100, c % 100)
    }
}

/// One line of the cost table. Costs are annualized dollars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReportRow {
    pub scenario: String,
    pub new_lines_built: usize,
    pub cap_exp_built: usize,
    pub new_line_cost: Cents,
    pub cap_exp_cost: Cents,
    pub total_exp_cost: Cents,
    pub gen_cost: Cents,
    pub total_cost: Cents,
}

pub const CSV_COLUMNS: [&str; 8] = [
    "scenario",
    "new_lines_built",
    "cap_exp_built",
    "new_line_cost",
    "cap_exp_cost",
    "total_exp_cost",
    "gen_cost",
    "total_cost",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub enable_vis: bool,
    pub max_path_edges: usize,
    pub sigma_hours: f64,
    pub asymmetric_capacity: bool,
    pub solve: SolveOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            enable_vis: true,
            max_path_edges: 3,
            sigma_hours: DEFAULT_SIGMA_HOURS,
            asymmetric_capacity: false,
            solve: SolveOptions::default(),
        }
    }
}

impl SweepOptions {
    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            sigma_hours: self.sigma_hours,
            asymmetric_capacity: self.asymmetric_capacity,
            valid_inequality_path_edges: self.enable_vis.then_some(self.max_path_edges),
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            enable_vis: self.enable_vis,
            ..self.solve.clone()
        }
    }
}

/// Everything produced for one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub code: ScenarioCode,
    pub params: ScenarioParams,
    /// `None` when the scenario failed before a solver status was reached.
    pub status: Option<SolveStatus>,
    pub error: Option<String>,
    pub objective: f64,
    pub stats: SolveStats,
    /// Present when the solve returned a point.
    pub row: Option<SweepReportRow>,
}

/// Recomputes the cost columns from a solution vector.
pub fn report_row(
    code: &ScenarioCode,
    net: &Network,
    vars: &VariableMap,
    sigma_hours: f64,
    values: &[f64],
) -> SweepReportRow {
    let mut new_lines = 0;
    let mut new_line_cost = Cents(0);
    for (id, &j) in &vars.build {
        if values[j] >= 0.5 {
            new_lines += 1;
            new_line_cost = new_line_cost + Cents::from_dollars(net.line(*id).expect("line").build_cost);
        }
    }
    let mut expansions = 0;
    let mut cap_exp_cost = Cents(0);
    for (id, &j) in &vars.expand {
        if values[j] >= 0.5 {
            expansions += 1;
            cap_exp_cost = cap_exp_cost + Cents::from_dollars(net.line(*id).expect("line").expand_cost);
        }
    }
    let gen_dollars: f64 = net
        .generators
        .iter()
        .map(|g| sigma_hours * g.cost_per_mwh * values[vars.gen[&g.id]] * net.base_mva)
        .sum();
    let gen_cost = Cents::from_dollars(gen_dollars);
    let total_exp_cost = new_line_cost + cap_exp_cost;
    SweepReportRow {
        scenario: code.to_string(),
        new_lines_built: new_lines,
        cap_exp_built: expansions,
        new_line_cost,
        cap_exp_cost,
        total_exp_cost,
        gen_cost,
        total_cost: total_exp_cost + gen_cost,
    }
}

/// Realizes, builds and solves one scenario.
pub fn solve_scenario(
    net: &Network,
    cfg: &ScenarioConfig,
    code: &ScenarioCode,
    opts: &SweepOptions,
) -> Result<(ScenarioOutcome, Model, Solution), ReportError> {
    let params = realize_scenario(code, net, cfg)?;
    let (model, vars) = build_tep_model(net, &params, &opts.build_options())?;
    let sol = solve_milp(&model, &opts.solve_options())?;
    let row = sol
        .has_point()
        .then(|| report_row(code, net, &vars, opts.sigma_hours, &sol.values));
    let outcome = ScenarioOutcome {
        code: code.clone(),
        params,
        status: Some(sol.status),
        error: None,
        objective: sol.objective,
        stats: sol.stats.clone(),
        row,
    };
    Ok((outcome, model, sol))
}

/// Like [`solve_scenario`] but records failures in the outcome instead of
/// returning them, so a sweep can carry on.
pub fn sweep_scenario(
    net: &Network,
    cfg: &ScenarioConfig,
    code: &ScenarioCode,
    opts: &SweepOptions,
) -> ScenarioOutcome {
    match solve_scenario(net, cfg, code, opts) {
        Ok((outcome, _, _)) => outcome,
        Err(e) => ScenarioOutcome {
            code: code.clone(),
            params: ScenarioParams { regions: Vec::new() },
            status: None,
            error: Some(e.to_string()),
            objective: f64::NAN,
            stats: SolveStats::default(),
            row: None,
        },
    }
}

impl ScenarioOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == Some(SolveStatus::Optimal)
    }

    pub fn status_label(&self) -> String {
        match self.status {
            Some(s) => s.to_string(),
            None => "error".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub header: Vec<(String, String)>,
    pub outcomes: Vec<ScenarioOutcome>,
}

impl SweepReport {
    pub fn new(net: &Network, cfg: &ScenarioConfig, opts: &SweepOptions, outcomes: Vec<ScenarioOutcome>) -> Self {
        let mut header = vec![
            ("regions".to_string(), net.regions.len().to_string()),
            ("buses".to_string(), net.buses.len().to_string()),
            ("lines".to_string(), net.lines.len().to_string()),
            ("base_mva".to_string(), net.base_mva.to_string()),
            ("gamma_low".to_string(), cfg.elasticity.gamma_low.to_string()),
            ("gamma_high".to_string(), cfg.elasticity.gamma_high.to_string()),
            ("sigma_hours".to_string(), opts.sigma_hours.to_string()),
            ("valid_inequalities".to_string(), opts.enable_vis.to_string()),
            ("max_path_edges".to_string(), opts.max_path_edges.to_string()),
            ("asymmetric_capacity".to_string(), opts.asymmetric_capacity.to_string()),
            ("rel_gap_tol".to_string(), opts.solve.rel_gap_tol.to_string()),
            ("feas_tol".to_string(), opts.solve.feas_tol.to_string()),
        ];
        if let Some(t) = opts.solve.time_limit_s {
            header.push(("time_limit_s".to_string(), t.to_string()));
        }
        if let Some(n) = opts.solve.node_limit {
            header.push(("node_limit".to_string(), n.to_string()));
        }
        if let Some(y) = cfg.base_year {
            header.push(("base_year".to_string(), y.to_string()));
        }
        if let Some(y) = cfg.horizon_year {
            header.push(("horizon_year".to_string(), y.to_string()));
        }
        SweepReport { header, outcomes }
    }

    pub fn all_optimal(&self) -> bool {
        self.outcomes.iter().all(ScenarioOutcome::is_optimal)
    }

    /// Delimited report: `#` header lines echoing the configuration, a column
    /// header row and one row per scenario in scenario order.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}={v}");
        }
        for o in &self.outcomes {
            if let Some(e) = &o.error {
                let _ = writeln!(
                    out,
                    "# scenario {} status=error message={}",
                    o.code,
                    e.replace('\n', " ")
                );
            } else if !o.is_optimal() {
                let _ = writeln!(out, "# scenario {} status={}", o.code, o.status_label());
            }
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for o in &self.outcomes {
            match &o.row {
                Some(r) => w.write_record([
                    r.scenario.clone(),
                    r.new_lines_built.to_string(),
                    r.cap_exp_built.to_string(),
                    r.new_line_cost.to_string(),
                    r.cap_exp_cost.to_string(),
                    r.total_exp_cost.to_string(),
                    r.gen_cost.to_string(),
                    r.total_cost.to_string(),
                ])?,
                None => {
                    let mut rec = vec![o.code.to_string()];
                    rec.extend(std::iter::repeat_n(String::new(), 7));
                    w.write_record(rec)?
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    /// Aligned table with costs in billions.
    pub fn to_table(&self) -> String {
        let titles = [
            "Scenario",
            "New Lines Built",
            "Cap. Exp. Built",
            "New Line Cost",
            "Cap. Exp. Cost",
            "Total Exp. Cost",
            "Gen. Cost",
            "Total Cost",
            "Status",
        ];
        let mut rows: Vec<Vec<String>> = Vec::new();
        for o in &self.outcomes {
            let mut cells = vec![o.code.to_string()];
            match &o.row {
                Some(r) => cells.extend([
                    r.new_lines_built.to_string(),
                    r.cap_exp_built.to_string(),
                    r.new_line_cost.billions(),
                    r.cap_exp_cost.billions(),
                    r.total_exp_cost.billions(),
                    r.gen_cost.billions(),
                    r.total_cost.billions(),
                ]),
                None => cells.extend(std::iter::repeat_n("-".to_string(), 7)),
            }
            cells.push(o.status_label());
            rows.push(cells);
        }
        let widths: Vec<usize> = (0..titles.len())
            .map(|c| {
                rows.iter()
                    .map(|r| r[c].len())
                    .chain([titles[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(titles.to_vec(), &mut out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(rule.iter().map(String::as_str).collect(), &mut out);
        for r in &rows {
            line(r.iter().map(String::as_str).collect(), &mut out);
        }
        out
    }

    /// `scenario nodes iterations cuts root_bound objective` lines.
    pub fn stats_table(&self) -> String {
        let mut out = String::from("scenario,status,nodes,simplex_iterations,cuts_enforced,root_bound,objective\n");
        for o in &self.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                o.code,
                o.status_label(),
                o.stats.nodes,
                o.stats.simplex_iterations,
                o.stats.cuts_enforced,
                o.stats.root_bound,
                o.objective
            );
        }
        out
    }
}

/// Sequential sweep over all scenarios in enumeration order.
pub fn run_sweep(net: &Network, cfg: &ScenarioConfig, opts: &SweepOptions) -> SweepReport {
    let outcomes = enumerate_scenarios(net.regions.len())
        .iter()
        .map(|code| sweep_scenario(net, cfg, code, opts))
        .collect();
    SweepReport::new(net, cfg, opts, outcomes)
}

/// Published Phoenix projection reference: (horizon year, increase °F).
pub const PHOENIX_REFERENCE: [(i32, f64); 3] = [(2035, 2.6), (2055, 3.6), (2085, 5.1)];

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub mean: TrendFit,
    /// `None` when fewer than two years lie above the mean trend line.
    pub exceedance: Option<TrendFit>,
    pub base_year: i32,
    /// (horizon, mean-trend increase, exceedance-trend increase)
    pub projections: Vec<(i32, f64, Option<f64>)>,
}

pub fn fit_report(series: &AnnualSeries, base_year: i32, horizons: &[i32]) -> Result<FitReport, ReportError> {
    let mean = fit_trend(series)?;
    let exceedance = match exceedance_trend(series, &mean) {
        Ok(f) => Some(f),
        Err(ThermalError::TooFewExceedances(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let projections = horizons
        .iter()
        .map(|&h| {
            (
                h,
                project_temperature(&mean, base_year, h),
                exceedance.as_ref().map(|f| project_temperature(f, base_year, h)),
            )
        })
        .collect();
    Ok(FitReport {
        mean,
        exceedance,
        base_year,
        projections,
    })
}

impl FitReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let fit_line = |s: &mut String, label: &str, f: &TrendFit| {
            let _ = writeln!(
                s,
                "{label:<16} slope {:.6} F/yr  intercept {:.4} F  r^2 {:.4}  points {}",
                f.slope_f_per_year, f.intercept_f, f.r_squared, f.n_points
            );
        };
        fit_line(&mut s, "mean trend", &self.mean);
        match &self.exceedance {
            Some(f) => fit_line(&mut s, "exceedance trend", f),
            None => s.push_str("exceedance trend fewer than 2 years above the mean trend line\n"),
        }
        let _ = writeln!(s, "projected increase since {}:", self.base_year);
        let _ = writeln!(
            s,
            "  {:>7}  {:>10}  {:>10}  {:>10}",
            "horizon", "mean", "exceedance", "reference"
        );
        for &(h, m, e) in &self.projections {
            let reference = PHOENIX_REFERENCE
                .iter()
                .find(|r| r.0 == h)
                .map(|r| format!("{:.1} F", r.1))
                .unwrap_or_else(|| "-".to_string());
            let e = e.map(|e| format!("{e:.2} F")).unwrap_or_else(|| "-".to_string());
            let _ = writeln!(s, "  {h:>7}  {m:>8.2} F  {e:>10}  {reference:>10}");
        }
        let _ = writeln!(
            s,
            "reference: published Phoenix projection reference (not computed here)"
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cents_render_exactly() {
        assert_eq!(Cents(123456).to_string(), "1234.56");
        assert_eq!(Cents(-5).to_string(), "-0.05");
        assert_eq!(Cents::from_dollars(24.26e9).billions(), "$24.26B");
        assert_eq!(Cents::from_dollars(1.234e9).billions(), "$1.23B");
        assert_eq!(Cents::from_dollars(0.1 + 0.2), Cents(30));
    }

    #[test]
    fn fit_report_projects_slope_times_years() {
        let pts: Vec<(i32, f64)> = (1950..2020)
            .map(|y| {
                (
                    y,
                    100.0 + 0.05 * (y - 1950) as f64 + if y % 2 == 0 { 0.5 } else { -0.5 },
                )
            })
            .collect();
        let series = AnnualSeries::new(pts).unwrap();
        let r = fit_report(&series, 1983, &[2035]).unwrap();
        assert_eq!(r.projections[0].1, r.mean.slope_f_per_year * 52.0);
        assert!(r.render().contains("published Phoenix projection reference"));
    }
}
