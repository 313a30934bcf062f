use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::model::{Constraint, Model, Sense, VarKind};
use super::vi::generate_valid_inequalities;
use crate::network::{validate, BusId, GeneratorId, Line, LineId, LineKind, Network, RegionId};
use crate::scenario::{line_eta, ScenarioParams};

pub const DEFAULT_SIGMA_HOURS: f64 = 8760.0;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("no scenario parameters for region {0}")]
    MissingRegion(RegionId),
    #[error("network is invalid: {0}")]
    InvalidNetwork(String),
    #[error("line {0} is not a candidate line")]
    NotCandidate(LineId),
    #[error("sigma_hours must be positive")]
    BadSigma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Hours of operation per year weighting the generation cost.
    pub sigma_hours: f64,
    /// Use the asymmetric reconductoring bound `-η(P̄⁰ - P̄¹z) ≤ P⁰` instead of
    /// the symmetric `-η(P̄⁰ + P̄¹z) ≤ P⁰`.
    pub asymmetric_capacity: bool,
    /// Attach path-based valid inequalities over paths of up to this many lines.
    pub valid_inequality_path_edges: Option<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            sigma_hours: DEFAULT_SIGMA_HOURS,
            asymmetric_capacity: false,
            valid_inequality_path_edges: None,
        }
    }
}

/// Where each network entity's decision variables live in the model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariableMap {
    /// Flow on every line (existing and candidate).
    pub flow: BTreeMap<LineId, usize>,
    pub build: BTreeMap<LineId, usize>,
    pub expand: BTreeMap<LineId, usize>,
    pub angle: BTreeMap<BusId, usize>,
    pub gen: BTreeMap<GeneratorId, usize>,
}

/// Big-M for a candidate line's angle coupling: the network angle limit.
///
/// With the line unbuilt its flow is zero, so the coupling residual is the
/// corridor angle difference, which is bounded by the angle limit.
pub fn big_m(line: &Line, net: &Network) -> Result<f64, BuildError> {
    if line.kind != LineKind::Candidate {
        return Err(BuildError::NotCandidate(line.id));
    }
    Ok(net.max_angle_rad)
}

/// Per-line capacity multipliers for a scenario.
pub(crate) fn line_etas(net: &Network, params: &ScenarioParams) -> Result<HashMap<LineId, f64>, BuildError> {
    let (eta, _) = params.tables();
    for r in &net.regions {
        if !eta.contains_key(&r.id) {
            return Err(BuildError::MissingRegion(r.id));
        }
    }
    let bus_region = net.bus_region_map();
    net.lines
        .iter()
        .map(|l| {
            let e = line_eta(l, &bus_region, &eta).ok_or_else(|| {
                let r = bus_region.get(&l.from_bus).copied().unwrap_or_default();
                BuildError::MissingRegion(r)
            })?;
            Ok((l.id, e))
        })
        .collect()
}

/// Builds the disjunctive DC-flow expansion model for one scenario.
///
/// Everything is in per-unit on `net.base_mva`. Flow `P` on line (i, j) obeys
/// `-(1/b)·P - (θ_i - θ_j) = 0` and enters the balance of bus i with a plus
/// sign and of bus j with a minus sign.
pub fn build_tep_model(
    net: &Network,
    params: &ScenarioParams,
    opts: &BuildOptions,
) -> Result<(Model, VariableMap), BuildError> {
    let violations = validate(net);
    if let Some(v) = violations.first() {
        return Err(BuildError::InvalidNetwork(v.to_string()));
    }
    if !(opts.sigma_hours > 0.0) {
        return Err(BuildError::BadSigma);
    }
    let (_, gamma) = params.tables();
    let etas = line_etas(net, params)?;
    let base = net.base_mva;

    let mut m = Model::new("tep");
    let mut vars = VariableMap::default();

    let reference = net.reference_bus();
    let mut buses: Vec<_> = net.buses.iter().collect();
    buses.sort_by_key(|b| b.id);
    for b in &buses {
        let (lo, hi) = if Some(b.id) == reference {
            (0.0, 0.0)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        let j = m.add_var(format!("th{}", b.id), VarKind::Continuous, lo, hi);
        vars.angle.insert(b.id, j);
    }

    for g in &net.generators {
        let j = m.add_var(format!("g{}", g.id), VarKind::Continuous, 0.0, g.capacity_mw / base);
        m.set_objective_coef(j, opts.sigma_hours * g.cost_per_mwh * base);
        vars.gen.insert(g.id, j);
    }

    for l in &net.lines {
        let eta = etas[&l.id];
        let cap = eta
            * (l.base_capacity_mw
                + if l.is_expandable() {
                    l.expansion_capacity_mw
                } else {
                    0.0
                })
            / base;
        let j = m.add_var(format!("p{}", l.id), VarKind::Continuous, -cap, cap);
        vars.flow.insert(l.id, j);
    }
    for l in net.lines.iter().filter(|l| l.is_candidate()) {
        let j = m.add_binary(format!("y{}", l.id));
        m.set_objective_coef(j, l.build_cost);
        vars.build.insert(l.id, j);
    }
    for l in net.lines.iter().filter(|l| l.is_expandable()) {
        let j = m.add_binary(format!("z{}", l.id));
        m.set_objective_coef(j, l.expand_cost);
        vars.expand.insert(l.id, j);
    }

    // Flow balance.
    for b in &buses {
        let mut terms = Vec::new();
        for l in &net.lines {
            if l.from_bus == b.id {
                terms.push((vars.flow[&l.id], 1.0));
            } else if l.to_bus == b.id {
                terms.push((vars.flow[&l.id], -1.0));
            }
        }
        for g in net.generators.iter().filter(|g| g.bus_id == b.id) {
            terms.push((vars.gen[&g.id], 1.0));
        }
        let rhs = gamma[&b.region_id] * b.demand_mw / base;
        m.add_constraint(Constraint::new(format!("bal{}", b.id), terms, Sense::Eq, rhs));
    }

    // Existing lines: capacity with optional reconductoring, exact angle coupling.
    for l in net.lines.iter().filter(|l| l.kind == LineKind::Existing) {
        let p = vars.flow[&l.id];
        let eta = etas[&l.id];
        if let Some(&z) = vars.expand.get(&l.id) {
            let base_cap = eta * l.base_capacity_mw / base;
            let extra = eta * l.expansion_capacity_mw / base;
            m.add_constraint(Constraint::new(
                format!("cu{}", l.id),
                vec![(p, 1.0), (z, -extra)],
                Sense::Le,
                base_cap,
            ));
            let lower_z = if opts.asymmetric_capacity { extra } else { -extra };
            m.add_constraint(Constraint::new(
                format!("cl{}", l.id),
                vec![(p, -1.0), (z, lower_z)],
                Sense::Le,
                base_cap,
            ));
        }
        m.add_constraint(Constraint::new(
            format!("ang{}", l.id),
            vec![
                (p, -1.0 / l.susceptance_pu),
                (vars.angle[&l.from_bus], -1.0),
                (vars.angle[&l.to_bus], 1.0),
            ],
            Sense::Eq,
            0.0,
        ));
    }

    // Candidate lines: capacity gated by the build decision, big-M coupling.
    for l in net.lines.iter().filter(|l| l.is_candidate()) {
        let p = vars.flow[&l.id];
        let y = vars.build[&l.id];
        let cap = etas[&l.id] * l.base_capacity_mw / base;
        m.add_constraint(Constraint::new(
            format!("ku{}", l.id),
            vec![(p, 1.0), (y, -cap)],
            Sense::Le,
            0.0,
        ));
        m.add_constraint(Constraint::new(
            format!("kl{}", l.id),
            vec![(p, -1.0), (y, -cap)],
            Sense::Le,
            0.0,
        ));
        let big = big_m(l, net)?;
        let coupling = [
            (p, -1.0 / l.susceptance_pu),
            (vars.angle[&l.from_bus], -1.0),
            (vars.angle[&l.to_bus], 1.0),
        ];
        let mut upper = coupling.to_vec();
        upper.push((y, big));
        m.add_constraint(Constraint::new(format!("mu{}", l.id), upper, Sense::Le, big));
        let mut lower = coupling.to_vec();
        lower.push((y, -big));
        m.add_constraint(Constraint::new(format!("ml{}", l.id), lower, Sense::Ge, -big));
    }

    // Angle-difference limits, once per corridor.
    for (_, lines) in corridors(net) {
        let first = lines[0];
        let (i, j) = (first.from_bus, first.to_bus);
        let terms = vec![(vars.angle[&i], 1.0), (vars.angle[&j], -1.0)];
        m.add_constraint(Constraint::new(
            format!("du{}", first.id),
            terms.clone(),
            Sense::Le,
            net.max_angle_rad,
        ));
        m.add_constraint(Constraint::new(
            format!("dl{}", first.id),
            terms,
            Sense::Ge,
            -net.max_angle_rad,
        ));
    }

    // A corridor is either reconductored or gets a new circuit, not both.
    let mut k = 0;
    for (_, lines) in corridors(net) {
        for e in lines.iter().filter(|l| l.is_expandable()) {
            for c in lines.iter().filter(|l| l.is_candidate()) {
                k += 1;
                m.add_constraint(Constraint::new(
                    format!("mx{k}"),
                    vec![(vars.expand[&e.id], 1.0), (vars.build[&c.id], 1.0)],
                    Sense::Le,
                    1.0,
                ));
            }
        }
    }

    if let Some(edges) = opts.valid_inequality_path_edges {
        m.cuts = generate_valid_inequalities(net, params, edges, &vars)?
            .into_iter()
            .map(|vi| vi.constraint)
            .collect();
    }

    Ok((m, vars))
}

/// Lines grouped by unordered endpoint pair, ordered by the lowest line id
/// in each group.
pub(crate) fn corridors(net: &Network) -> Vec<((BusId, BusId), Vec<&Line>)> {
    let mut groups: BTreeMap<(BusId, BusId), Vec<&Line>> = BTreeMap::new();
    for l in &net.lines {
        groups.entry(l.corridor()).or_default().push(l);
    }
    let mut out: Vec<_> = groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|l| l.id);
            (k, v)
        })
        .collect();
    out.sort_by_key(|(_, v)| v[0].id);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_garver;

    #[test]
    fn big_m_is_angle_limit() {
        let mut net = builtin_garver();
        net.max_angle_rad = 0.6;
        for l in net.candidate_lines() {
            assert_eq!(big_m(l, &net).unwrap(), 0.6);
        }
        let existing = net.lines.iter().find(|l| l.kind == LineKind::Existing).unwrap();
        assert_eq!(big_m(existing, &net), Err(BuildError::NotCandidate(existing.id)));
    }

    #[test]
    fn missing_region_params_rejected() {
        let net = builtin_garver();
        let mut params = ScenarioParams::unit(&net);
        params.regions.pop();
        assert!(matches!(
            build_tep_model(&net, &params, &BuildOptions::default()),
            Err(BuildError::MissingRegion(_))
        ));
    }

    #[test]
    fn variable_map_is_total() {
        let net = builtin_garver();
        let (m, vars) = build_tep_model(&net, &ScenarioParams::unit(&net), &BuildOptions::default()).unwrap();
        assert_eq!(vars.angle.len(), net.buses.len());
        assert_eq!(vars.flow.len(), net.lines.len());
        assert_eq!(vars.build.len(), net.candidate_lines().count());
        assert_eq!(vars.expand.len(), net.expandable_lines().count());
        assert_eq!(vars.gen.len(), net.generators.len());
        assert!(m.invariant_violations().is_empty());
        for name in m
            .variables
            .iter()
            .map(|v| &v.name)
            .chain(m.constraints.iter().map(|c| &c.name))
        {
            assert!(name.len() <= 8, "{name}");
        }
    }
}
