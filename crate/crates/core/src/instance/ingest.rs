//! Assembles a network document from substation, plant and line tables.
//!
//! * substations: `id,name,lat,lon,population_weight,region_id`
//! * plants: `bus_id,capacity_mw,fuel_class,cost_per_mwh`
//! * lines: `from_bus,to_bus,voltage_kv,kind,expandable`
//!
//! Demand is spread over substations by population weight, line lengths are
//! great-circle distances, and electrical data and costs come from the voltage
//! class table. Regions are created for every region id that appears, with
//! the temperature expectations from the config (edit the document to refine
//! them per region).

use std::collections::BTreeSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::cost::{estimate_line_cost, CostKind};
use super::load::disaggregate_load;
use super::synth::{default_voltage_classes, SynthesisConfig, VoltageClass};
use super::InstanceError;
use crate::network::{validate, Bus, BusId, ConductorParams, FuelClass, Generator, Line, LineKind, Network, Region};

const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestConfig {
    pub total_demand_mw: f64,
    pub voltage_classes: Vec<VoltageClass>,
    pub annualization: f64,
    pub max_angle_rad: f64,
    pub base_peak_temp_f: f64,
    pub projected_increase_low_f: f64,
    pub projected_increase_high_f: f64,
    /// Reconductoring adds this fraction of the base rating.
    pub expansion_fraction: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            total_demand_mw: 1000.0,
            voltage_classes: default_voltage_classes(),
            annualization: 0.1,
            max_angle_rad: 1.0,
            base_peak_temp_f: 105.0,
            projected_increase_low_f: 2.0,
            projected_increase_high_f: 5.0,
            expansion_fraction: 0.5,
        }
    }
}

#[derive(Debug, Deserialize)]
struct SubstationRow {
    id: BusId,
    name: String,
    lat: f64,
    lon: f64,
    population_weight: f64,
    region_id: u32,
}

#[derive(Debug, Deserialize)]
struct PlantRow {
    bus_id: BusId,
    capacity_mw: f64,
    fuel_class: String,
    cost_per_mwh: f64,
}

#[derive(Debug, Deserialize)]
struct LineRow {
    from_bus: BusId,
    to_bus: BusId,
    voltage_kv: f64,
    kind: String,
    #[serde(default)]
    expandable: Option<bool>,
}

fn rows<T: for<'de> Deserialize<'de>, R: Read>(reader: R, what: &str) -> Result<Vec<T>, InstanceError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| InstanceError::Csv(format!("{what} row {}: {e}", i + 1))))
        .collect()
}

fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().asin()
}

pub fn ingest_network<R1: Read, R2: Read, R3: Read>(
    substations: R1,
    plants: R2,
    lines: R3,
    cfg: &IngestConfig,
) -> Result<Network, InstanceError> {
    let subs: Vec<SubstationRow> = rows(substations, "substation")?;
    let plants: Vec<PlantRow> = rows(plants, "plant")?;
    let line_rows: Vec<LineRow> = rows(lines, "line")?;
    let table = SynthesisConfig {
        voltage_classes: cfg.voltage_classes.clone(),
        annualization: cfg.annualization,
        ..Default::default()
    }
    .cost_table();

    let weights: Vec<f64> = subs.iter().map(|s| s.population_weight).collect();
    let demand = disaggregate_load(cfg.total_demand_mw, &weights)?;
    let buses: Vec<Bus> = subs
        .iter()
        .zip(&demand)
        .map(|(s, &d)| Bus {
            id: s.id,
            name: s.name.clone(),
            region_id: s.region_id,
            demand_mw: d,
            population_weight: s.population_weight,
        })
        .collect();
    let region_ids: BTreeSet<u32> = subs.iter().map(|s| s.region_id).collect();
    let regions = region_ids
        .into_iter()
        .map(|id| Region {
            id,
            name: format!("Region {id}"),
            base_peak_temp_f: cfg.base_peak_temp_f,
            projected_increase_low_f: cfg.projected_increase_low_f,
            projected_increase_high_f: cfg.projected_increase_high_f,
        })
        .collect();

    let generators = plants
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let fuel: FuelClass = p.fuel_class.parse().map_err(InstanceError::Csv)?;
            Ok(Generator {
                id: i as u32 + 1,
                bus_id: p.bus_id,
                capacity_mw: p.capacity_mw,
                cost_per_mwh: p.cost_per_mwh,
                fuel_class: fuel,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let position = |id: BusId| {
        subs.iter()
            .find(|s| s.id == id)
            .map(|s| (s.lat, s.lon))
            .ok_or_else(|| InstanceError::Csv(format!("line references unknown substation {id}")))
    };
    let mut net_lines = Vec::new();
    for (i, r) in line_rows.iter().enumerate() {
        let class = cfg
            .voltage_classes
            .iter()
            .find(|v| (v.voltage_kv - r.voltage_kv).abs() <= 1e-9 * r.voltage_kv.abs().max(1.0))
            .ok_or(InstanceError::UnknownVoltageClass(r.voltage_kv))?;
        let kind = match r.kind.trim() {
            "existing" => LineKind::Existing,
            "candidate" => LineKind::Candidate,
            other => {
                return Err(InstanceError::Csv(format!(
                    "line row {}: unknown kind {other:?}",
                    i + 1
                )))
            }
        };
        let length = haversine_km(position(r.from_bus)?, position(r.to_bus)?).max(1.0);
        let expandable = kind == LineKind::Existing && r.expandable.unwrap_or(false);
        net_lines.push(Line {
            id: i as u32 + 1,
            from_bus: r.from_bus,
            to_bus: r.to_bus,
            kind,
            expandable,
            susceptance_pu: 1.0 / (class.reactance_pu_per_km * length),
            base_capacity_mw: class.rating_mw,
            expansion_capacity_mw: if expandable {
                cfg.expansion_fraction * class.rating_mw
            } else {
                0.0
            },
            build_cost: if kind == LineKind::Candidate {
                estimate_line_cost(r.voltage_kv, length, &table, CostKind::Build)?
            } else {
                0.0
            },
            expand_cost: if expandable {
                estimate_line_cost(r.voltage_kv, length, &table, CostKind::Reconductor)?
            } else {
                0.0
            },
            voltage_kv: r.voltage_kv,
            length_km: length,
            conductor: ConductorParams::DRAKE,
        });
    }

    let net = Network {
        regions,
        buses,
        generators,
        lines: net_lines,
        base_mva: crate::network::DEFAULT_BASE_MVA,
        max_angle_rad: cfg.max_angle_rad,
    };
    let violations = validate(&net);
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(InstanceError::Invalid(
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUBS: &str = "id,name,lat,lon,population_weight,region_id\n1,North,34.0,-112.0,1,1\n2,South,33.0,-112.0,3,2\n3,East,33.5,-111.0,0,2\n";
    const PLANTS: &str = "bus_id,capacity_mw,fuel_class,cost_per_mwh\n1,900,natural_gas,30\n3,400,solar,0\n";
    const LINES: &str = "from_bus,to_bus,voltage_kv,kind,expandable\n1,2,345,existing,true\n2,3,230,existing,false\n1,3,230,candidate,\n";

    #[test]
    fn builds_a_valid_document() {
        let net = ingest_network(
            SUBS.as_bytes(),
            PLANTS.as_bytes(),
            LINES.as_bytes(),
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(net.buses.len(), 3);
        assert_eq!(net.regions.len(), 2);
        assert!((net.buses[1].demand_mw - 750.0).abs() < 1e-9);
        assert!(net.lines[0].is_expandable());
        assert!(net.lines[2].is_candidate());
        // One degree of latitude is about 111 km.
        assert!((net.lines[0].length_km - 111.2).abs() < 0.5);
    }

    #[test]
    fn unknown_voltage_rejected() {
        let lines = "from_bus,to_bus,voltage_kv,kind,expandable\n1,2,115,existing,false\n";
        let err = ingest_network(
            SUBS.as_bytes(),
            PLANTS.as_bytes(),
            lines.as_bytes(),
            &IngestConfig::default(),
        );
        assert_eq!(err.unwrap_err(), InstanceError::UnknownVoltageClass(115.0));
    }
}
