//! The 6-bus Garver system.
//!
//! Bus demands, generation limits, and the reactance, rating and relative
//! cost of every corridor follow L. L. Garver, "Transmission network
//! estimation using linear programming", IEEE Trans. PAS-89 (1970), in the
//! tabulation of R. Romero, A. Monticelli, A. Garcia and S. Haffner, "Test
//! systems and mathematical models for transmission network expansion
//! planning", IEE Proc. Gener. Transm. Distrib. 149(1), 2002 (100 MVA base).
//!
//! Everything else is local to this repository: generator costs, the two
//! climate regions and their temperatures, the candidate subset, the
//! reconductoring options, lengths and the annualization of corridor costs
//! (tabulated cost units are read as $M and annualized at 10 %).

use crate::network::{Bus, BusId, ConductorParams, FuelClass, Generator, Line, LineId, LineKind, Network, Region};

/// Total demand of the published system, MW.
pub const GARVER_TOTAL_DEMAND_MW: f64 = 760.0;

const ANNUALIZATION: f64 = 0.1;
const COST_UNIT: f64 = 1e6;
const VOLTAGE_KV: f64 = 230.0;
/// Corridor length per unit of reactance, km.
const KM_PER_PU_REACTANCE: f64 = 250.0;

/// Published corridor data: (from, to, reactance pu, rating MW, cost units).
const CORRIDORS: [(BusId, BusId, f64, f64, f64); 15] = [
    (1, 2, 0.40, 100.0, 40.0),
    (1, 3, 0.38, 100.0, 38.0),
    (1, 4, 0.60, 80.0, 60.0),
    (1, 5, 0.20, 100.0, 20.0),
    (1, 6, 0.68, 70.0, 68.0),
    (2, 3, 0.20, 100.0, 20.0),
    (2, 4, 0.40, 100.0, 40.0),
    (2, 5, 0.31, 100.0, 31.0),
    (2, 6, 0.30, 100.0, 30.0),
    (3, 4, 0.59, 82.0, 59.0),
    (3, 5, 0.20, 100.0, 20.0),
    (3, 6, 0.48, 100.0, 48.0),
    (4, 5, 0.63, 75.0, 63.0),
    (4, 6, 0.30, 100.0, 30.0),
    (5, 6, 0.61, 78.0, 61.0),
];

/// Existing circuits of the base topology.
const EXISTING: [(BusId, BusId); 6] = [(1, 2), (1, 4), (1, 5), (2, 3), (2, 4), (3, 5)];

/// Existing circuits that may be reconductored for +50 % rating at 30 % of the
/// corridor's build cost.
const EXPANDABLE: [(BusId, BusId); 3] = [(3, 5), (2, 3), (1, 4)];

/// Candidate circuits, in line-id order (repeated corridors are parallel circuits).
const CANDIDATES: [(BusId, BusId); 10] = [
    (2, 6),
    (2, 6),
    (3, 6),
    (4, 6),
    (4, 6),
    (5, 6),
    (3, 5),
    (2, 3),
    (2, 5),
    (1, 3),
];

fn corridor(from: BusId, to: BusId) -> (f64, f64, f64) {
    let (_, _, x, cap, cost) = CORRIDORS
        .iter()
        .copied()
        .find(|c| (c.0, c.1) == (from, to))
        .expect("corridor is tabulated");
    (x, cap, cost)
}

fn line(id: LineId, from: BusId, to: BusId, kind: LineKind) -> Line {
    let (x, cap, cost) = corridor(from, to);
    let annual = cost * COST_UNIT * ANNUALIZATION;
    let expandable = kind == LineKind::Existing && EXPANDABLE.contains(&(from, to));
    Line {
        id,
        from_bus: from,
        to_bus: to,
        kind,
        expandable,
        susceptance_pu: 1.0 / x,
        base_capacity_mw: cap,
        expansion_capacity_mw: if expandable { 0.5 * cap } else { 0.0 },
        build_cost: if kind == LineKind::Candidate { annual } else { 0.0 },
        expand_cost: if expandable { 0.3 * annual } else { 0.0 },
        voltage_kv: VOLTAGE_KV,
        length_km: x * KM_PER_PU_REACTANCE,
        conductor: ConductorParams::DRAKE,
    }
}

pub fn builtin_garver() -> Network {
    let demand = [80.0, 240.0, 40.0, 160.0, 240.0, 0.0];
    let buses = demand
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let id = i as BusId + 1;
            Bus {
                id,
                name: format!("Bus {id}"),
                region_id: if id <= 3 { 1 } else { 2 },
                demand_mw: d,
                population_weight: d / GARVER_TOTAL_DEMAND_MW,
            }
        })
        .collect();
    let generators = vec![
        Generator {
            id: 1,
            bus_id: 1,
            capacity_mw: 150.0,
            cost_per_mwh: 35.0,
            fuel_class: FuelClass::NaturalGas,
        },
        Generator {
            id: 2,
            bus_id: 3,
            capacity_mw: 360.0,
            cost_per_mwh: 28.0,
            fuel_class: FuelClass::Coal,
        },
        Generator {
            id: 3,
            bus_id: 6,
            capacity_mw: 600.0,
            cost_per_mwh: 12.0,
            fuel_class: FuelClass::Hydro,
        },
    ];
    let regions = vec![
        Region {
            id: 1,
            name: "West".into(),
            base_peak_temp_f: 110.0,
            projected_increase_low_f: 2.0,
            projected_increase_high_f: 5.0,
        },
        Region {
            id: 2,
            name: "East".into(),
            base_peak_temp_f: 104.0,
            projected_increase_low_f: 3.0,
            projected_increase_high_f: 6.0,
        },
    ];
    let mut lines = Vec::new();
    for &(f, t) in &EXISTING {
        lines.push(line(lines.len() as LineId + 1, f, t, LineKind::Existing));
    }
    for &(f, t) in &CANDIDATES {
        lines.push(line(lines.len() as LineId + 1, f, t, LineKind::Candidate));
    }
    Network {
        regions,
        buses,
        generators,
        lines,
        base_mva: 100.0,
        max_angle_rad: 1.0,
    }
}
