//! Seeded synthetic grids built the way a state-scale planning case is
//! assembled: disaggregated load, a geographic backbone, sited generation and
//! candidate corridors from leaf buses and from generation toward demand.
//!
//! Randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! so other implementations of the same generator reproduce the fixtures.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cost::{estimate_line_cost, CostClass, CostKind, CostTable};
use super::load::disaggregate_load;
use super::InstanceError;
use crate::network::{Bus, BusId, ConductorParams, FuelClass, Generator, Line, LineId, LineKind, Network, Region};

/// Installed generation is at least this multiple of total demand.
pub const GENERATION_HEADROOM: f64 = 1.2;
/// Extra backbone chords per bus on top of the spanning tree (rounded up).
pub const CHORD_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoltageClass {
    pub voltage_kv: f64,
    pub build_per_km: f64,
    pub reconductor_per_km: f64,
    pub rating_mw: f64,
    /// Series reactance per km on the network MVA base.
    pub reactance_pu_per_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CandidateRules {
    /// Buses with at most this many existing lines get a candidate to their
    /// nearest non-adjacent bus.
    pub leaf_degree: usize,
    /// Share of generator buses, by installed capacity, counted as high generation.
    pub high_generation_fraction: f64,
    /// Share of buses, by demand, counted as high demand.
    pub high_demand_fraction: f64,
    /// Cap on candidates; leaf candidates are kept first.
    pub max_candidates: Option<usize>,
    /// Share of existing lines offered for reconductoring.
    pub expandable_fraction: f64,
}

impl Default for CandidateRules {
    fn default() -> Self {
        CandidateRules {
            leaf_degree: 1,
            high_generation_fraction: 0.5,
            high_demand_fraction: 0.3,
            max_candidates: None,
            expandable_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisConfig {
    pub n_buses: usize,
    pub n_regions: usize,
    pub seed: u64,
    pub demand_total_mw: f64,
    pub voltage_classes: Vec<VoltageClass>,
    pub annualization: f64,
    pub candidate_rules: CandidateRules,
    /// Side of the square the buses are scattered over, km.
    pub area_km: f64,
    pub max_angle_rad: f64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            n_buses: 8,
            n_regions: 2,
            seed: 1,
            demand_total_mw: 1000.0,
            voltage_classes: default_voltage_classes(),
            annualization: 0.1,
            candidate_rules: CandidateRules::default(),
            area_km: 300.0,
            max_angle_rad: 1.0,
        }
    }
}

pub fn default_voltage_classes() -> Vec<VoltageClass> {
    vec![
        VoltageClass {
            voltage_kv: 138.0,
            build_per_km: 1.0e6,
            reconductor_per_km: 0.4e6,
            rating_mw: 200.0,
            reactance_pu_per_km: 0.0021,
        },
        VoltageClass {
            voltage_kv: 230.0,
            build_per_km: 1.4e6,
            reconductor_per_km: 0.55e6,
            rating_mw: 400.0,
            reactance_pu_per_km: 0.00076,
        },
        VoltageClass {
            voltage_kv: 345.0,
            build_per_km: 2.0e6,
            reconductor_per_km: 0.8e6,
            rating_mw: 900.0,
            reactance_pu_per_km: 0.00029,
        },
    ]
}

impl SynthesisConfig {
    pub fn cost_table(&self) -> CostTable {
        CostTable {
            classes: self
                .voltage_classes
                .iter()
                .map(|v| CostClass {
                    voltage_kv: v.voltage_kv,
                    build_per_km: v.build_per_km,
                    reconductor_per_km: v.reconductor_per_km,
                    annualization: self.annualization,
                })
                .collect(),
        }
    }

    fn check(&self) -> Result<(), InstanceError> {
        let bad = |m: &str| Err(InstanceError::Config(m.to_string()));
        if self.n_buses < 2 {
            return bad("n_buses must be at least 2");
        }
        if self.n_regions == 0 {
            return bad("n_regions must be positive");
        }
        if self.n_buses < self.n_regions {
            return bad("n_buses must be at least n_regions");
        }
        if !(self.demand_total_mw > 0.0) {
            return bad("demand_total_mw must be positive");
        }
        if self.voltage_classes.is_empty() {
            return bad("voltage_classes must not be empty");
        }
        if self
            .voltage_classes
            .iter()
            .any(|v| !(v.rating_mw > 0.0 && v.reactance_pu_per_km > 0.0))
        {
            return bad("voltage class ratings and reactances must be positive");
        }
        if let Some(v) = self.cost_table().violations().into_iter().next() {
            return Err(InstanceError::Config(v));
        }
        if !(self.area_km > 0.0 && self.max_angle_rad > 0.0) {
            return bad("area_km and max_angle_rad must be positive");
        }
        let r = &self.candidate_rules;
        for f in [
            r.high_generation_fraction,
            r.high_demand_fraction,
            r.expandable_fraction,
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad("candidate rule fractions must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

fn round_to(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

struct Builder<'a> {
    cfg: &'a SynthesisConfig,
    table: CostTable,
    coords: Vec<(f64, f64)>,
    lines: Vec<Line>,
}

impl<'a> Builder<'a> {
    fn distance(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (self.coords[a], self.coords[b]);
        let d = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
        round_to(d.max(1.0), 0.1)
    }

    fn add_line(&mut self, a: usize, b: usize, class: usize, kind: LineKind) -> Result<(), InstanceError> {
        let v = &self.cfg.voltage_classes[class];
        let length = self.distance(a, b);
        let x = v.reactance_pu_per_km * length;
        let build_cost = match kind {
            LineKind::Candidate => round_to(
                estimate_line_cost(v.voltage_kv, length, &self.table, CostKind::Build)?,
                1.0,
            ),
            LineKind::Existing => 0.0,
        };
        let (from, to) = if a < b { (a, b) } else { (b, a) };
        self.lines.push(Line {
            id: self.lines.len() as LineId + 1,
            from_bus: from as BusId + 1,
            to_bus: to as BusId + 1,
            kind,
            expandable: false,
            susceptance_pu: 1.0 / x,
            base_capacity_mw: v.rating_mw,
            expansion_capacity_mw: 0.0,
            build_cost,
            expand_cost: 0.0,
            voltage_kv: v.voltage_kv,
            length_km: length,
            conductor: ConductorParams::DRAKE,
        });
        Ok(())
    }

    fn nearest(&self, from: usize, among: impl Iterator<Item = usize>) -> Option<usize> {
        among.filter(|&b| b != from).min_by(|&a, &b| {
            self.distance(from, a)
                .total_cmp(&self.distance(from, b))
                .then(a.cmp(&b))
        })
    }
}

/// Deterministic synthetic network for a seed.
pub fn synthesize_grid(cfg: &SynthesisConfig) -> Result<Network, InstanceError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_buses;

    let regions: Vec<Region> = (1..=cfg.n_regions)
        .map(|r| {
            let low = round_to(rng.gen_range(1.0..3.0), 0.1);
            Region {
                id: r as u32,
                name: format!("Region {r}"),
                base_peak_temp_f: round_to(rng.gen_range(100.0..112.0), 0.1),
                projected_increase_low_f: low,
                projected_increase_high_f: round_to(low + rng.gen_range(1.0..3.0), 0.1),
            }
        })
        .collect();

    let mut region_of: Vec<u32> = (0..n).map(|i| (i % cfg.n_regions) as u32 + 1).collect();
    region_of.shuffle(&mut rng);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..cfg.area_km), rng.gen_range(0.0..cfg.area_km)))
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| round_to(rng.gen_range(0.2..1.0), 0.001)).collect();
    let demand = disaggregate_load(cfg.demand_total_mw, &weights)?;
    let buses: Vec<Bus> = (0..n)
        .map(|i| Bus {
            id: i as BusId + 1,
            name: format!("Bus {}", i + 1),
            region_id: region_of[i],
            demand_mw: demand[i],
            population_weight: weights[i],
        })
        .collect();

    let mut b = Builder {
        cfg,
        table: cfg.cost_table(),
        coords,
        lines: Vec::new(),
    };
    let n_classes = cfg.voltage_classes.len();

    // Backbone: attach buses in random order to their nearest attached bus.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacent: HashSet<(usize, usize)> = HashSet::new();
    for k in 1..n {
        let v = order[k];
        let u = b.nearest(v, order[..k].iter().copied()).expect("earlier bus exists");
        let class = rng.gen_range(0..n_classes);
        b.add_line(u, v, class, LineKind::Existing)?;
        adjacent.insert((u.min(v), u.max(v)));
    }
    let chords = (CHORD_FRACTION * n as f64).ceil() as usize;
    let max_pairs = n * (n - 1) / 2;
    let mut attempts = 0;
    let mut added = 0;
    while added < chords && adjacent.len() < max_pairs && attempts < 100 * n {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || adjacent.contains(&(u.min(v), u.max(v))) {
            continue;
        }
        let class = rng.gen_range(0..n_classes);
        b.add_line(u, v, class, LineKind::Existing)?;
        adjacent.insert((u.min(v), u.max(v)));
        added += 1;
    }

    // Generation at a third of the buses, covering the headroom.
    let n_gen = n.div_ceil(3);
    let mut sites: Vec<usize> = (0..n).collect();
    sites.shuffle(&mut rng);
    sites.truncate(n_gen);
    sites.sort_unstable();
    let gen_weights: Vec<f64> = sites.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
    let capacity = disaggregate_load(GENERATION_HEADROOM * cfg.demand_total_mw, &gen_weights)?;
    let generators: Vec<Generator> = sites
        .iter()
        .zip(&capacity)
        .enumerate()
        .map(|(k, (&s, &cap))| Generator {
            id: k as u32 + 1,
            bus_id: s as BusId + 1,
            // Round up so rounding never eats into the headroom.
            capacity_mw: (cap * 1000.0).ceil() / 1000.0,
            cost_per_mwh: round_to(rng.gen_range(10.0..60.0), 0.01),
            fuel_class: FuelClass::ALL[rng.gen_range(0..FuelClass::ALL.len())],
        })
        .collect();

    // Candidate corridors.
    let rules = &cfg.candidate_rules;
    let mut degree = vec![0usize; n];
    for l in &b.lines {
        degree[l.from_bus as usize - 1] += 1;
        degree[l.to_bus as usize - 1] += 1;
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (v, &deg) in degree.iter().enumerate() {
        if deg > rules.leaf_degree {
            continue;
        }
        let target = b.nearest(v, (0..n).filter(|&u| !adjacent.contains(&(u.min(v), u.max(v)))));
        let target = target.or_else(|| b.nearest(v, 0..n));
        if let Some(u) = target {
            if chosen.insert((u.min(v), u.max(v))) {
                pairs.push((v, u));
            }
        }
    }
    let mut gen_at = vec![0.0; n];
    for g in &generators {
        gen_at[g.bus_id as usize - 1] += g.capacity_mw;
    }
    let top = |values: &[f64], fraction: f64, pool: &[usize]| -> Vec<usize> {
        let mut idx = pool.to_vec();
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let keep = ((fraction * idx.len() as f64).ceil() as usize).min(idx.len());
        idx.truncate(keep);
        idx
    };
    let high_gen = top(&gen_at, rules.high_generation_fraction, &sites);
    let all: Vec<usize> = (0..n).collect();
    let high_demand = top(&demand, rules.high_demand_fraction, &all);
    for &g in &high_gen {
        if let Some(d) = b.nearest(g, high_demand.iter().copied()) {
            if chosen.insert((g.min(d), g.max(d))) {
                pairs.push((g, d));
            }
        }
    }
    if let Some(cap) = rules.max_candidates {
        pairs.truncate(cap);
    }
    for (u, v) in pairs {
        let class = rng.gen_range(0..n_classes);
        b.add_line(u, v, class, LineKind::Candidate)?;
    }

    // Reconductoring options on a share of the existing lines.
    let existing: Vec<usize> = (0..b.lines.len()).filter(|&i| !b.lines[i].is_candidate()).collect();
    let n_expand = (rules.expandable_fraction * existing.len() as f64).round() as usize;
    let mut pick = existing.clone();
    pick.shuffle(&mut rng);
    pick.truncate(n_expand);
    pick.sort_unstable();
    for i in pick {
        let l = &mut b.lines[i];
        l.expandable = true;
        l.expansion_capacity_mw = 0.5 * l.base_capacity_mw;
        l.expand_cost = round_to(
            estimate_line_cost(l.voltage_kv, l.length_km, &b.table, CostKind::Reconductor)?,
            1.0,
        );
    }

    Ok(Network {
        regions,
        buses,
        generators,
        lines: b.lines,
        base_mva: crate::network::DEFAULT_BASE_MVA,
        max_angle_rad: cfg.max_angle_rad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate;

    #[test]
    fn same_seed_same_network() {
        let cfg = SynthesisConfig::default();
        assert_eq!(synthesize_grid(&cfg).unwrap(), synthesize_grid(&cfg).unwrap());
        let other = SynthesisConfig { seed: 2, ..cfg.clone() };
        assert_ne!(synthesize_grid(&cfg).unwrap(), synthesize_grid(&other).unwrap());
    }

    #[test]
    fn output_validates_with_headroom() {
        for seed in 0..20 {
            let cfg = SynthesisConfig {
                seed,
                n_buses: 5 + seed as usize % 7,
                n_regions: 1 + seed as usize % 4,
                ..Default::default()
            };
            let net = synthesize_grid(&cfg).unwrap();
            assert!(validate(&net).is_empty(), "seed {seed}: {:?}", validate(&net));
            assert!(net.total_generation_mw() >= GENERATION_HEADROOM * net.total_demand_mw() - 1e-6);
            assert!(net.is_connected_existing());
        }
    }

    #[test]
    fn too_few_buses_for_regions() {
        let cfg = SynthesisConfig {
            n_buses: 3,
            n_regions: 4,
            ..Default::default()
        };
        assert!(matches!(synthesize_grid(&cfg), Err(InstanceError::Config(_))));
    }
}
