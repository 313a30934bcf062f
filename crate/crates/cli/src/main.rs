use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use tep_core::instance::{builtin_garver, ingest_network, synthesize_grid, IngestConfig, SynthesisConfig};
use tep_core::milp::{build_tep_model, export_lp, export_mps, import_mps, BuildOptions, Model, DEFAULT_SIGMA_HOURS};
use tep_core::network::{validate, ConductorParams, Network};
use tep_core::report::{fit_report, sweep_scenario, SweepOptions, SweepReport, PHOENIX_REFERENCE};
use tep_core::scenario::{enumerate_scenarios, realize_scenario, ScenarioCode, ScenarioConfig};
use tep_core::solver::solfile::write_solution_values;
use tep_core::solver::{brute_force_solve, solve_milp, Solution, SolveOptions, SolveStatus};
use tep_core::thermal::{derating_factor, f_to_c, read_daily_tmax, top_k_mean_series, TmaxUnits};

#[derive(Parser)]
#[command(name = "tep", version, about = "Temperature-aware transmission expansion planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network document and print any violations.
    Validate {
        #[arg(long)]
        network: PathBuf,
    },
    /// Fit peak-temperature trends to daily maxima and project increases.
    Fit(FitArgs),
    /// Print the capacity multiplier for a conductor between two ambient temperatures.
    Derate(DerateArgs),
    /// Build the planning model for one scenario and export it.
    Build(BuildArgs),
    /// Solve one scenario, or an MPS file.
    Solve(SolveArgs),
    /// Solve every scenario and write the cost report.
    Sweep(SweepArgs),
    /// Generate a synthetic network document.
    Synth(SynthArgs),
    /// Assemble a network document from substation, plant and line tables.
    Ingest(IngestArgs),
}

#[derive(Args)]
struct FitArgs {
    /// CSV with STATION, DATE and TMAX columns.
    #[arg(long)]
    temps: PathBuf,
    /// Hottest days averaged per year.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1983)]
    base_year: i32,
    #[arg(long, value_delimiter = ',', default_values_t = PHOENIX_REFERENCE.map(|r| r.0))]
    horizons: Vec<i32>,
    #[arg(long, value_enum, default_value_t = Units::Fahrenheit)]
    units: Units,
    #[arg(long)]
    station: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Fahrenheit,
    TenthsCelsius,
}

#[derive(Args)]
struct DerateArgs {
    /// Base ambient temperature.
    #[arg(long, allow_hyphen_values = true)]
    t_base: f64,
    /// Future ambient temperature.
    #[arg(long, allow_hyphen_values = true)]
    t_future: f64,
    /// Temperatures are in Celsius rather than Fahrenheit.
    #[arg(long)]
    celsius: bool,
    /// Conductor parameters as JSON; defaults to 795 kcmil Drake ACSR.
    #[arg(long)]
    conductor: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Network document; the built-in Garver 6-bus case when omitted.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Scenario configuration document.
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Scenario code such as `L,H`; all-low when omitted.
    #[arg(long)]
    scenario: Option<String>,
    /// Attach valid inequalities over paths of up to --max-path-edges lines.
    #[arg(long)]
    vis: bool,
    #[arg(long, default_value_t = 3)]
    max_path_edges: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_HOURS)]
    sigma_hours: f64,
    /// Use the asymmetric reconductoring flow bound.
    #[arg(long)]
    asymmetric_capacity: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    mps: Option<PathBuf>,
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Solve this MPS file instead of building a model.
    #[arg(long, conflicts_with_all = ["network", "scenarios", "scenario"])]
    mps: Option<PathBuf>,
    /// Enumerate every binary assignment instead of branch and bound.
    #[arg(long)]
    brute_force: bool,
    #[command(flatten)]
    limits: LimitArgs,
    /// Write `name value` lines for the solution.
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitArgs {
    /// Relative optimality gap.
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    /// Wall-clock limit per solve, seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
}

impl LimitArgs {
    fn solve_options(&self, enable_vis: bool) -> SolveOptions {
        SolveOptions {
            rel_gap_tol: self.gap,
            time_limit_s: self.time_limit,
            node_limit: self.node_limit,
            enable_vis,
            ..SolveOptions::default()
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    scenarios: Option<PathBuf>,
    #[arg(long, overrides_with = "no_vis")]
    enable_vis: bool,
    #[arg(long, overrides_with = "enable_vis")]
    no_vis: bool,
    #[arg(long, default_value_t = 3)]
    max_path_edges: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_HOURS)]
    sigma_hours: f64,
    #[arg(long)]
    asymmetric_capacity: bool,
    #[command(flatten)]
    limits: LimitArgs,
    /// Concurrent scenario solves; all cores when omitted.
    #[arg(long)]
    workers: Option<usize>,
    /// Delimited report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-scenario solver statistics here.
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthesis config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    buses: Option<usize>,
    #[arg(long)]
    regions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_candidates: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    substations: PathBuf,
    #[arg(long)]
    plants: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_network_file(path: Option<&Path>) -> Result<Network> {
    match path {
        Some(p) => tep_core::load_network(&read(p)?).with_context(|| format!("loading {}", p.display())),
        None => Ok(builtin_garver()),
    }
}

fn load_scenario_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::from_json(&read(p)?).with_context(|| format!("loading {}", p.display())),
        None => Ok(ScenarioConfig::default()),
    }
}

fn build_model(args: &ModelArgs) -> Result<(Network, Model, tep_core::milp::VariableMap)> {
    let net = load_network_file(args.network.as_deref())?;
    let cfg = load_scenario_config(args.scenarios.as_deref())?;
    let code: ScenarioCode = match &args.scenario {
        Some(s) => s.parse()?,
        None => enumerate_scenarios(net.regions.len()).remove(0),
    };
    let params = realize_scenario(&code, &net, &cfg)?;
    let opts = BuildOptions {
        sigma_hours: args.sigma_hours,
        asymmetric_capacity: args.asymmetric_capacity,
        valid_inequality_path_edges: args.vis.then_some(args.max_path_edges),
    };
    let (model, vars) = build_tep_model(&net, &params, &opts)?;
    Ok((net, model, vars))
}

fn cmd_validate(network: &Path) -> Result<ExitCode> {
    let net: Network = serde_json::from_str(&read(network)?).context("parsing network document")?;
    let violations = validate(&net);
    if violations.is_empty() {
        println!(
            "ok: {} regions, {} buses, {} generators, {} lines ({} candidate, {} expandable)",
            net.regions.len(),
            net.buses.len(),
            net.generators.len(),
            net.lines.len(),
            net.candidate_lines().count(),
            net.expandable_lines().count()
        );
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("{v}");
    }
    println!("{} violation(s)", violations.len());
    Ok(ExitCode::FAILURE)
}

fn cmd_fit(args: &FitArgs) -> Result<ExitCode> {
    let units = match args.units {
        Units::Fahrenheit => TmaxUnits::Fahrenheit,
        Units::TenthsCelsius => TmaxUnits::TenthsCelsius,
    };
    let file = fs::File::open(&args.temps).with_context(|| format!("opening {}", args.temps.display()))?;
    let daily = read_daily_tmax(file, units, args.station.as_deref())?;
    if daily.missing > 0 {
        log::warn!("{} rows without a usable TMAX value", daily.missing);
    }
    let top = top_k_mean_series(&daily.records, args.k)?;
    for (year, n) in &top.skipped {
        log::warn!("skipped {year}: only {n} records");
    }
    let report = fit_report(&top.series, args.base_year, &args.horizons)?;
    print!("{}", report.render());
    Ok(ExitCode::SUCCESS)
}

fn cmd_derate(args: &DerateArgs) -> Result<ExitCode> {
    let conductor = match &args.conductor {
        Some(p) => serde_json::from_str(&read(p)?).context("parsing conductor")?,
        None => ConductorParams::DRAKE,
    };
    let problems = conductor.violations();
    if !problems.is_empty() {
        bail!("invalid conductor: {}", problems.join(", "));
    }
    let (base, future) = if args.celsius {
        (args.t_base, args.t_future)
    } else {
        (f_to_c(args.t_base), f_to_c(args.t_future))
    };
    let eta = derating_factor(&conductor, base, future)?;
    println!("{eta}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_build(args: &BuildArgs) -> Result<ExitCode> {
    let (_, model, _) = build_model(&args.model)?;
    if let Some(p) = &args.mps {
        write(p, &export_mps(&model))?;
    }
    if let Some(p) = &args.lp {
        write(p, &export_lp(&model))?;
    }
    print!("{}", model.stats().render());
    Ok(ExitCode::SUCCESS)
}

fn print_solution(model: &Model, sol: &Solution) {
    println!("status {}", sol.status);
    if sol.has_point() {
        println!("objective {}", sol.objective);
        println!("best_bound {}", sol.best_bound);
        println!("relative_gap {:e}", sol.relative_gap().max(0.0));
    }
    println!("nodes {}", sol.stats.nodes);
    println!("simplex_iterations {}", sol.stats.simplex_iterations);
    println!("cuts_enforced {}", sol.stats.cuts_enforced);
    println!("wall_time_s {:.3}", sol.stats.wall_time_s);
    if sol.has_point() {
        let chosen: Vec<&str> = model
            .binary_indices()
            .into_iter()
            .filter(|&j| sol.values[j] >= 0.5)
            .map(|j| model.variables[j].name.as_str())
            .collect();
        println!("binaries_at_one {}", chosen.join(" "));
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let model = match &args.mps {
        Some(p) => import_mps(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => build_model(&args.model)?.1,
    };
    let sol = if args.brute_force {
        brute_force_solve(&model)?
    } else {
        solve_milp(&model, &args.limits.solve_options(!model.cuts.is_empty()))?
    };
    print_solution(&model, &sol);
    if let Some(p) = &args.solution_out {
        if sol.has_point() {
            write(p, &write_solution_values(&model, &sol.values))?;
        }
    }
    Ok(if sol.status == SolveStatus::Optimal {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let net = load_network_file(Some(&args.network))?;
    let cfg = load_scenario_config(args.scenarios.as_deref())?;
    let enable_vis = !args.no_vis;
    let opts = SweepOptions {
        enable_vis,
        max_path_edges: args.max_path_edges,
        sigma_hours: args.sigma_hours,
        asymmetric_capacity: args.asymmetric_capacity,
        solve: args.limits.solve_options(enable_vis),
    };
    let codes = enumerate_scenarios(net.regions.len());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().context("starting worker pool")?;
    // Collecting an indexed parallel iterator keeps scenario order.
    let outcomes: Vec<_> = pool.install(|| {
        codes
            .par_iter()
            .map(|code| {
                let o = sweep_scenario(&net, &cfg, code, &opts);
                log::info!("scenario {code}: {}", o.status_label());
                o
            })
            .collect()
    });
    let report = SweepReport::new(&net, &cfg, &opts, outcomes);
    for o in &report.outcomes {
        if let Some(e) = &o.error {
            eprintln!("scenario {} failed: {e}", o.code);
        }
    }
    if let Some(p) = &args.out {
        write(p, &report.to_csv()?)?;
    }
    if let Some(p) = &args.stats_out {
        write(p, &report.stats_table())?;
    }
    for (k, v) in &report.header {
        println!("# {k}={v}");
    }
    print!("{}", report.to_table());
    Ok(if report.all_optimal() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_synth(args: &SynthArgs) -> Result<ExitCode> {
    let mut cfg: SynthesisConfig = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?).context("parsing synthesis config")?,
        None => SynthesisConfig::default(),
    };
    if let Some(n) = args.buses {
        cfg.n_buses = n;
    }
    if let Some(r) = args.regions {
        cfg.n_regions = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.max_candidates.is_some() {
        cfg.candidate_rules.max_candidates = args.max_candidates;
    }
    let net = synthesize_grid(&cfg)?;
    write(&args.out, &tep_core::serialize_network(&net))?;
    println!(
        "wrote {} ({} buses, {} regions, {} candidates, {} expandable)",
        args.out.display(),
        net.buses.len(),
        net.regions.len(),
        net.candidate_lines().count(),
        net.expandable_lines().count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_ingest(args: &IngestArgs) -> Result<ExitCode> {
    let cfg: IngestConfig = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?).context("parsing ingest config")?,
        None => IngestConfig::default(),
    };
    let open = |p: &Path| fs::File::open(p).with_context(|| format!("opening {}", p.display()));
    let net = ingest_network(open(&args.substations)?, open(&args.plants)?, open(&args.lines)?, &cfg)?;
    write(&args.out, &tep_core::serialize_network(&net))?;
    println!(
        "wrote {} ({} buses, {} lines)",
        args.out.display(),
        net.buses.len(),
        net.lines.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { network } => cmd_validate(network),
        Command::Fit(a) => cmd_fit(a),
        Command::Derate(a) => cmd_derate(a),
        Command::Build(a) => cmd_build(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Ingest(a) => cmd_ingest(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
