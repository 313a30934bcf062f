//! Power-network data model: buses, regions, generators and lines, with
//! validation, document I/O and simple-path enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type BusId = u32;
pub type RegionId = u32;
pub type GeneratorId = u32;
pub type LineId = u32;

pub const DEFAULT_BASE_MVA: f64 = 100.0;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("network failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub id: RegionId,
    pub name: String,
    /// Current summer peak ambient temperature, °F.
    pub base_peak_temp_f: f64,
    pub projected_increase_low_f: f64,
    pub projected_increase_high_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: BusId,
    pub name: String,
    pub region_id: RegionId,
    /// Unscaled peak demand, MW.
    pub demand_mw: f64,
    pub population_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuelClass {
    NaturalGas,
    Coal,
    Petroleum,
    Hydro,
    Wind,
    Solar,
}

impl FuelClass {
    pub const ALL: [FuelClass; 6] = [
        FuelClass::NaturalGas,
        FuelClass::Coal,
        FuelClass::Petroleum,
        FuelClass::Hydro,
        FuelClass::Wind,
        FuelClass::Solar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FuelClass::NaturalGas => "natural_gas",
            FuelClass::Coal => "coal",
            FuelClass::Petroleum => "petroleum",
            FuelClass::Hydro => "hydro",
            FuelClass::Wind => "wind",
            FuelClass::Solar => "solar",
        }
    }
}

impl std::str::FromStr for FuelClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FuelClass::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| format!("unknown fuel class {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: GeneratorId,
    pub bus_id: BusId,
    pub capacity_mw: f64,
    pub cost_per_mwh: f64,
    pub fuel_class: FuelClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Existing,
    Candidate,
}

/// Conductor properties entering the steady-state heat balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductorParams {
    pub diameter_m: f64,
    /// AC resistance at the maximum conductor temperature, Ω/m.
    pub resistance_ohm_per_m: f64,
    pub emissivity: f64,
    pub absorptivity: f64,
    pub max_conductor_temp_c: f64,
    /// Average convective heat transfer coefficient, W/m²·K.
    pub heat_transfer_coeff: f64,
    /// Peak solar radiation, W/m².
    pub solar_radiation: f64,
}

impl ConductorParams {
    /// 795 kcmil 26/7 "Drake" ACSR.
    pub const DRAKE: ConductorParams = ConductorParams {
        diameter_m: 0.0281,
        resistance_ohm_per_m: 8.688e-5,
        emissivity: 0.8,
        absorptivity: 0.8,
        max_conductor_temp_c: 75.0,
        heat_transfer_coeff: 15.0,
        solar_radiation: 1000.0,
    };

    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.diameter_m > 0.0) {
            out.push("conductor diameter_m must be positive");
        }
        if !(self.resistance_ohm_per_m > 0.0) {
            out.push("conductor resistance_ohm_per_m must be positive");
        }
        if !(self.emissivity > 0.0 && self.emissivity <= 1.0) {
            out.push("conductor emissivity must lie in (0, 1]");
        }
        if !(self.absorptivity > 0.0 && self.absorptivity <= 1.0) {
            out.push("conductor absorptivity must lie in (0, 1]");
        }
        if !(self.max_conductor_temp_c > 0.0) {
            out.push("conductor max_conductor_temp_c must be positive");
        }
        if !(self.heat_transfer_coeff > 0.0) {
            out.push("conductor heat_transfer_coeff must be positive");
        }
        if !(self.solar_radiation >= 0.0) {
            out.push("conductor solar_radiation must be nonnegative");
        }
        out
    }
}

impl Default for ConductorParams {
    fn default() -> Self {
        ConductorParams::DRAKE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    pub kind: LineKind,
    /// Eligible for reconductoring. Only meaningful for existing lines.
    pub expandable: bool,
    pub susceptance_pu: f64,
    pub base_capacity_mw: f64,
    pub expansion_capacity_mw: f64,
    /// Annualized cost of building a candidate line, $.
    pub build_cost: f64,
    /// Annualized cost of reconductoring an expandable line, $.
    pub expand_cost: f64,
    pub voltage_kv: f64,
    pub length_km: f64,
    #[serde(default)]
    pub conductor: ConductorParams,
}

impl Line {
    pub fn is_candidate(&self) -> bool {
        self.kind == LineKind::Candidate
    }

    pub fn is_expandable(&self) -> bool {
        self.kind == LineKind::Existing && self.expandable
    }

    /// Unordered endpoint pair, the corridor this line occupies.
    pub fn corridor(&self) -> (BusId, BusId) {
        if self.from_bus <= self.to_bus {
            (self.from_bus, self.to_bus)
        } else {
            (self.to_bus, self.from_bus)
        }
    }

    pub fn other_end(&self, bus: BusId) -> BusId {
        if bus == self.from_bus {
            self.to_bus
        } else {
            self.from_bus
        }
    }
}

fn default_base_mva() -> f64 {
    DEFAULT_BASE_MVA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub regions: Vec<Region>,
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub lines: Vec<Line>,
    #[serde(default = "default_base_mva")]
    pub base_mva: f64,
    pub max_angle_rad: f64,
}

/// A broken rule, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            entity: entity.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

/// Parses a network document and validates it.
pub fn load_network(text: &str) -> Result<Network, NetworkError> {
    let net: Network = serde_json::from_str(text)?;
    let violations = validate(&net);
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(NetworkError::Invalid(violations))
    }
}

pub fn serialize_network(net: &Network) -> String {
    let mut s = serde_json::to_string_pretty(net).expect("network serializes");
    s.push('\n');
    s
}

fn duplicates<I: IntoIterator<Item = u32>>(ids: I) -> Vec<u32> {
    let mut seen = HashSet::new();
    let mut dup = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            dup.insert(id);
        }
    }
    dup.into_iter().collect()
}

pub fn validate(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();

    if net.buses.is_empty() {
        out.push(Violation::new("network", "at least one bus is required"));
    }
    if net.generators.is_empty() {
        out.push(Violation::new("network", "at least one generator is required"));
    }
    if !(net.base_mva > 0.0) {
        out.push(Violation::new("network", "base_mva must be positive"));
    }
    if !(net.max_angle_rad > 0.0) {
        out.push(Violation::new("network", "max_angle_rad must be positive"));
    }

    for id in duplicates(net.regions.iter().map(|r| r.id)) {
        out.push(Violation::new(format!("region {id}"), "duplicate region id"));
    }
    for id in duplicates(net.buses.iter().map(|b| b.id)) {
        out.push(Violation::new(format!("bus {id}"), "duplicate bus id"));
    }
    for id in duplicates(net.generators.iter().map(|g| g.id)) {
        out.push(Violation::new(format!("generator {id}"), "duplicate generator id"));
    }
    for id in duplicates(net.lines.iter().map(|l| l.id)) {
        out.push(Violation::new(format!("line {id}"), "duplicate line id"));
    }

    let region_ids: HashSet<RegionId> = net.regions.iter().map(|r| r.id).collect();
    let bus_ids: HashSet<BusId> = net.buses.iter().map(|b| b.id).collect();

    for r in &net.regions {
        let name = format!("region {}", r.id);
        if !(r.projected_increase_low_f >= 0.0) {
            out.push(Violation::new(&name, "projected_increase_low_f must be nonnegative"));
        }
        if !(r.projected_increase_high_f >= r.projected_increase_low_f) {
            out.push(Violation::new(
                &name,
                "projected_increase_high_f must be at least projected_increase_low_f",
            ));
        }
        if !r.base_peak_temp_f.is_finite() {
            out.push(Violation::new(&name, "base_peak_temp_f must be finite"));
        }
    }

    for b in &net.buses {
        let name = format!("bus {}", b.id);
        if !(b.demand_mw >= 0.0) {
            out.push(Violation::new(&name, "demand_mw must be nonnegative"));
        }
        if !(b.population_weight >= 0.0) {
            out.push(Violation::new(&name, "population_weight must be nonnegative"));
        }
        if !region_ids.contains(&b.region_id) {
            out.push(Violation::new(
                &name,
                format!("references undeclared region {}", b.region_id),
            ));
        }
    }

    for g in &net.generators {
        let name = format!("generator {}", g.id);
        if !bus_ids.contains(&g.bus_id) {
            out.push(Violation::new(&name, format!("references unknown bus {}", g.bus_id)));
        }
        if !(g.capacity_mw >= 0.0) {
            out.push(Violation::new(&name, "capacity_mw must be nonnegative"));
        }
        if !(g.cost_per_mwh >= 0.0) {
            out.push(Violation::new(&name, "cost_per_mwh must be nonnegative"));
        }
    }

    for l in &net.lines {
        let name = format!("line {}", l.id);
        for end in [l.from_bus, l.to_bus] {
            if !bus_ids.contains(&end) {
                out.push(Violation::new(&name, format!("references unknown bus {end}")));
            }
        }
        if l.from_bus == l.to_bus {
            out.push(Violation::new(&name, "from_bus and to_bus must differ"));
        }
        if l.kind == LineKind::Candidate && l.expandable {
            out.push(Violation::new(
                &name,
                "candidate lines cannot be expandable: only existing lines can have their capacity expanded",
            ));
        }
        if l.expandable && l.kind == LineKind::Existing {
            if !(l.expansion_capacity_mw > 0.0) {
                out.push(Violation::new(
                    &name,
                    "expandable line needs positive expansion_capacity_mw",
                ));
            }
            if !(l.expand_cost > 0.0) {
                out.push(Violation::new(&name, "expandable line needs positive expand_cost"));
            }
        }
        if !(l.susceptance_pu > 0.0) {
            out.push(Violation::new(&name, "susceptance_pu must be positive"));
        }
        if !(l.base_capacity_mw > 0.0) {
            out.push(Violation::new(&name, "base_capacity_mw must be positive"));
        }
        if !(l.expansion_capacity_mw >= 0.0) {
            out.push(Violation::new(&name, "expansion_capacity_mw must be nonnegative"));
        }
        if !(l.build_cost >= 0.0) {
            out.push(Violation::new(&name, "build_cost must be nonnegative"));
        }
        if !(l.expand_cost >= 0.0) {
            out.push(Violation::new(&name, "expand_cost must be nonnegative"));
        }
        if !(l.voltage_kv > 0.0) {
            out.push(Violation::new(&name, "voltage_kv must be positive"));
        }
        if !(l.length_km > 0.0) {
            out.push(Violation::new(&name, "length_km must be positive"));
        }
        for rule in l.conductor.violations() {
            out.push(Violation::new(&name, rule));
        }
    }

    // Connectivity over existing lines: buses outside the largest component
    // must carry no demand.
    if !net.buses.is_empty() {
        let components = existing_components(net);
        let main = components
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b.first().cmp(&a.first())))
            .cloned()
            .unwrap_or_default();
        let main: HashSet<BusId> = main.into_iter().collect();
        for b in &net.buses {
            if !main.contains(&b.id) && b.demand_mw > 0.0 {
                out.push(Violation::new(
                    format!("bus {}", b.id),
                    "disconnected from the main existing network but has nonzero demand",
                ));
            }
        }
    }

    out
}

/// Connected components over existing lines, each sorted, ordered by lowest bus id.
fn existing_components(net: &Network) -> Vec<Vec<BusId>> {
    let mut adj: BTreeMap<BusId, Vec<BusId>> = net.buses.iter().map(|b| (b.id, Vec::new())).collect();
    for l in net.lines.iter().filter(|l| l.kind == LineKind::Existing) {
        if adj.contains_key(&l.from_bus) && adj.contains_key(&l.to_bus) {
            adj.get_mut(&l.from_bus).unwrap().push(l.to_bus);
            adj.get_mut(&l.to_bus).unwrap().push(l.from_bus);
        }
    }
    let mut seen = HashSet::new();
    let mut components = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(b) = stack.pop() {
            for &n in &adj[&b] {
                if seen.insert(n) {
                    comp.push(n);
                    stack.push(n);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

impl Network {
    pub fn bus(&self, id: BusId) -> Option<&Bus> {
        self.buses.iter().find(|b| b.id == id)
    }

    pub fn region(&self, id: RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn line(&self, id: LineId) -> Option<&Line> {
        self.lines.iter().find(|l| l.id == id)
    }

    pub fn bus_region_map(&self) -> HashMap<BusId, RegionId> {
        self.buses.iter().map(|b| (b.id, b.region_id)).collect()
    }

    pub fn total_demand_mw(&self) -> f64 {
        self.buses.iter().map(|b| b.demand_mw).sum()
    }

    pub fn total_generation_mw(&self) -> f64 {
        self.generators.iter().map(|g| g.capacity_mw).sum()
    }

    pub fn candidate_lines(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.is_candidate())
    }

    pub fn expandable_lines(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.is_expandable())
    }

    /// True when every bus is reachable over existing lines.
    pub fn is_connected_existing(&self) -> bool {
        existing_components(self).len() <= 1
    }

    /// Bus with the lowest id, the angle reference.
    pub fn reference_bus(&self) -> Option<BusId> {
        self.buses.iter().map(|b| b.id).min()
    }
}

/// A simple path over existing and candidate lines.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    /// Buses in traversal order, from `start` to `end`.
    pub buses: Vec<BusId>,
    /// Lines in traversal order; `lines[k]` joins `buses[k]` and `buses[k + 1]`.
    pub lines: Vec<LineId>,
}

impl Path {
    pub fn start(&self) -> BusId {
        self.buses[0]
    }

    pub fn end(&self) -> BusId {
        *self.buses.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// All simple paths with between 2 and `max_edges` lines, each reported once:
/// traversal runs from the lower-id endpoint to the higher-id endpoint.
///
/// Paths are returned sorted by (bus sequence, line sequence).
pub fn enumerate_simple_paths(net: &Network, max_edges: usize) -> Vec<Path> {
    let mut adj: BTreeMap<BusId, Vec<(LineId, BusId)>> = net.buses.iter().map(|b| (b.id, Vec::new())).collect();
    for l in &net.lines {
        if l.from_bus == l.to_bus {
            continue;
        }
        if let Some(v) = adj.get_mut(&l.from_bus) {
            v.push((l.id, l.to_bus));
        }
        if let Some(v) = adj.get_mut(&l.to_bus) {
            v.push((l.id, l.from_bus));
        }
    }
    for v in adj.values_mut() {
        v.sort_unstable();
    }

    let mut out = Vec::new();
    let mut buses = Vec::new();
    let mut lines = Vec::new();
    for &start in adj.keys() {
        buses.clear();
        lines.clear();
        buses.push(start);
        extend_paths(&adj, max_edges, &mut buses, &mut lines, &mut out);
    }
    out.sort();
    out
}

fn extend_paths(
    adj: &BTreeMap<BusId, Vec<(LineId, BusId)>>,
    max_edges: usize,
    buses: &mut Vec<BusId>,
    lines: &mut Vec<LineId>,
    out: &mut Vec<Path>,
) {
    let tip = *buses.last().unwrap();
    if lines.len() >= 2 && buses[0] < tip {
        out.push(Path {
            buses: buses.clone(),
            lines: lines.clone(),
        });
    }
    if lines.len() == max_edges {
        return;
    }
    for &(line, next) in &adj[&tip] {
        if buses.contains(&next) {
            continue;
        }
        buses.push(next);
        lines.push(line);
        extend_paths(adj, max_edges, buses, lines, out);
        buses.pop();
        lines.pop();
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn simple_line(id: LineId, from: BusId, to: BusId) -> Line {
        Line {
            id,
            from_bus: from,
            to_bus: to,
            kind: LineKind::Existing,
            expandable: false,
            susceptance_pu: 5.0,
            base_capacity_mw: 100.0,
            expansion_capacity_mw: 0.0,
            build_cost: 0.0,
            expand_cost: 0.0,
            voltage_kv: 230.0,
            length_km: 50.0,
            conductor: ConductorParams::DRAKE,
        }
    }

    pub(crate) fn bus(id: BusId, demand: f64) -> Bus {
        Bus {
            id,
            name: format!("b{id}"),
            region_id: 1,
            demand_mw: demand,
            population_weight: 1.0,
        }
    }

    pub(crate) fn region(id: RegionId) -> Region {
        Region {
            id,
            name: format!("r{id}"),
            base_peak_temp_f: 105.0,
            projected_increase_low_f: 2.0,
            projected_increase_high_f: 5.0,
        }
    }

    fn triangle() -> Network {
        Network {
            regions: vec![region(1)],
            buses: vec![bus(1, 0.0), bus(2, 50.0), bus(3, 50.0)],
            generators: vec![Generator {
                id: 1,
                bus_id: 1,
                capacity_mw: 200.0,
                cost_per_mwh: 20.0,
                fuel_class: FuelClass::Coal,
            }],
            lines: vec![simple_line(1, 1, 2), simple_line(2, 2, 3), simple_line(3, 3, 1)],
            base_mva: 100.0,
            max_angle_rad: 0.6,
        }
    }

    #[test]
    fn triangle_is_valid() {
        assert!(validate(&triangle()).is_empty());
    }

    #[test]
    fn triangle_has_three_two_edge_paths() {
        let paths = enumerate_simple_paths(&triangle(), 2);
        assert_eq!(paths.len(), 3);
        for p in &paths {
            assert_eq!(p.len(), 2);
            assert!(p.start() < p.end());
        }
    }

    #[test]
    fn single_line_has_no_paths() {
        let mut net = triangle();
        net.buses.truncate(2);
        net.lines.truncate(1);
        assert!(enumerate_simple_paths(&net, 3).is_empty());
    }

    #[test]
    fn candidate_expandable_is_one_violation() {
        let mut net = triangle();
        net.lines[0].kind = LineKind::Candidate;
        net.lines[0].expandable = true;
        net.lines[0].expansion_capacity_mw = 50.0;
        net.lines[0].expand_cost = 1.0;
        let v = validate(&net);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0]
            .rule
            .contains("only existing lines can have their capacity expanded"));
    }

    #[test]
    fn zero_susceptance_is_one_violation() {
        let mut net = triangle();
        net.lines[1].susceptance_pu = 0.0;
        let v = validate(&net);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "line 2");
    }

    #[test]
    fn dangling_bus_reference_rejected() {
        let mut net = triangle();
        net.lines[2].to_bus = 99;
        let text = serialize_network(&net);
        match load_network(&text) {
            Err(NetworkError::Invalid(v)) => {
                assert!(v.iter().any(|x| x.rule.contains("unknown bus 99")))
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn empty_bus_list_rejected() {
        let mut net = triangle();
        net.buses.clear();
        net.lines.clear();
        net.generators[0].bus_id = 1;
        let v = validate(&net);
        assert!(v.iter().any(|x| x.rule == "at least one bus is required"));
    }

    #[test]
    fn disconnected_bus_with_demand_rejected() {
        let mut net = triangle();
        net.buses.push(bus(4, 10.0));
        let v = validate(&net);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "bus 4");
        net.buses[3].demand_mw = 0.0;
        assert!(validate(&net).is_empty());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = serialize_network(&triangle()).replacen("\"base_mva\"", "\"colour\": 1, \"base_mva\"", 1);
        assert!(matches!(load_network(&text), Err(NetworkError::Parse(_))));
    }

    #[test]
    fn document_round_trip() {
        let net = triangle();
        let back = load_network(&serialize_network(&net)).unwrap();
        assert_eq!(back, net);
    }
}
