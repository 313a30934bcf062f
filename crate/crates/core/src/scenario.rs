//! High/low temperature scenarios over climate regions and their realization
//! into per-region capacity and demand multipliers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{ConductorParams, Line, Network, RegionId};
use crate::thermal::{derating_factor, f_to_c, ThermalError};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario code has {code} marks but the network declares {regions} regions")]
    LengthMismatch { code: usize, regions: usize },
    #[error("bad scenario code {0:?}: expected comma-separated L/H marks")]
    BadCode(String),
    #[error("region {region}: {source}")]
    Derating {
        region: RegionId,
        #[source]
        source: ThermalError,
    },
    #[error("invalid demand elasticity: need 1 <= gamma_low <= gamma_high")]
    BadElasticity,
    #[error("scenario configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Low,
    High,
}

impl Mark {
    pub fn letter(self) -> char {
        match self {
            Mark::Low => 'L',
            Mark::High => 'H',
        }
    }
}

/// One L/H mark per region, in region declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScenarioCode(pub Vec<Mark>);

impl ScenarioCode {
    pub fn marks(&self) -> &[Mark] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with the mark at `idx` replaced.
    pub fn with_mark(&self, idx: usize, mark: Mark) -> Self {
        let mut m = self.0.clone();
        m[idx] = mark;
        ScenarioCode(m)
    }
}

impl fmt::Display for ScenarioCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

impl FromStr for ScenarioCode {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| match t.trim() {
                "L" | "l" => Ok(Mark::Low),
                "H" | "h" => Ok(Mark::High),
                _ => Err(ScenarioError::BadCode(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ScenarioCode)
    }
}

/// All `2^num_regions` codes in lexicographic order with `L < H`.
pub fn enumerate_scenarios(num_regions: usize) -> Vec<ScenarioCode> {
    let count = 1usize << num_regions;
    (0..count)
        .map(|i| {
            ScenarioCode(
                (0..num_regions)
                    .map(|pos| {
                        if i >> (num_regions - 1 - pos) & 1 == 1 {
                            Mark::High
                        } else {
                            Mark::Low
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandElasticityConfig {
    pub gamma_low: f64,
    pub gamma_high: f64,
}

impl Default for DemandElasticityConfig {
    /// Placeholder multipliers; override from configuration for real studies.
    fn default() -> Self {
        DemandElasticityConfig {
            gamma_low: 1.02,
            gamma_high: 1.05,
        }
    }
}

impl DemandElasticityConfig {
    pub fn is_valid(&self) -> bool {
        self.gamma_low >= 1.0 && self.gamma_high >= self.gamma_low
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConductor {
    pub region_id: RegionId,
    pub conductor: ConductorParams,
}

/// Scenario configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub elasticity: DemandElasticityConfig,
    /// Representative conductor for regions without an override.
    #[serde(default)]
    pub default_conductor: ConductorParams,
    #[serde(default)]
    pub region_conductors: Vec<RegionConductor>,
    #[serde(default)]
    pub base_year: Option<i32>,
    #[serde(default)]
    pub horizon_year: Option<i32>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        if !cfg.elasticity.is_valid() {
            return Err(ScenarioError::BadElasticity);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn conductor_for(&self, region: RegionId) -> &ConductorParams {
        self.region_conductors
            .iter()
            .find(|rc| rc.region_id == region)
            .map(|rc| &rc.conductor)
            .unwrap_or(&self.default_conductor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub region_id: RegionId,
    /// Capacity multiplier in (0, 1].
    pub eta: f64,
    /// Demand multiplier, at least 1.
    pub gamma: f64,
    pub temp_increase_f: f64,
}

/// Per-region model coefficients for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub regions: Vec<RegionParams>,
}

impl ScenarioParams {
    /// No derating and no demand growth.
    pub fn unit(net: &Network) -> Self {
        ScenarioParams {
            regions: net
                .regions
                .iter()
                .map(|r| RegionParams {
                    region_id: r.id,
                    eta: 1.0,
                    gamma: 1.0,
                    temp_increase_f: 0.0,
                })
                .collect(),
        }
    }

    pub fn get(&self, region: RegionId) -> Option<&RegionParams> {
        self.regions.iter().find(|p| p.region_id == region)
    }

    /// Copy with every capacity multiplier scaled by `factor`.
    pub fn scale_eta(&self, factor: f64) -> Self {
        ScenarioParams {
            regions: self
                .regions
                .iter()
                .map(|p| RegionParams {
                    eta: p.eta * factor,
                    ..*p
                })
                .collect(),
        }
    }

    /// Lookup tables keyed by region id: (eta, gamma).
    pub fn tables(&self) -> (HashMap<RegionId, f64>, HashMap<RegionId, f64>) {
        (
            self.regions.iter().map(|p| (p.region_id, p.eta)).collect(),
            self.regions.iter().map(|p| (p.region_id, p.gamma)).collect(),
        )
    }
}

/// Capacity multiplier applied to a line: the smaller of its two endpoint
/// regions' multipliers.
pub fn line_eta(line: &Line, bus_region: &HashMap<u32, RegionId>, eta: &HashMap<RegionId, f64>) -> Option<f64> {
    let a = eta.get(bus_region.get(&line.from_bus)?)?;
    let b = eta.get(bus_region.get(&line.to_bus)?)?;
    Some(a.min(*b))
}

pub fn realize_scenario(
    code: &ScenarioCode,
    net: &Network,
    cfg: &ScenarioConfig,
) -> Result<ScenarioParams, ScenarioError> {
    if code.len() != net.regions.len() {
        return Err(ScenarioError::LengthMismatch {
            code: code.len(),
            regions: net.regions.len(),
        });
    }
    if !cfg.elasticity.is_valid() {
        return Err(ScenarioError::BadElasticity);
    }
    let regions = net
        .regions
        .iter()
        .zip(code.marks())
        .map(|(region, &mark)| {
            let (increase, gamma) = match mark {
                Mark::Low => (region.projected_increase_low_f, cfg.elasticity.gamma_low),
                Mark::High => (region.projected_increase_high_f, cfg.elasticity.gamma_high),
            };
            let t_base = f_to_c(region.base_peak_temp_f);
            let t_future = f_to_c(region.base_peak_temp_f + increase);
            let eta = derating_factor(cfg.conductor_for(region.id), t_base, t_future).map_err(|source| {
                ScenarioError::Derating {
                    region: region.id,
                    source,
                }
            })?;
            Ok(RegionParams {
                region_id: region.id,
                eta,
                gamma,
                temp_increase_f: increase,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScenarioParams { regions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_garver;
    use proptest::prelude::*;

    #[test]
    fn four_regions_give_sixteen_codes() {
        let codes = enumerate_scenarios(4);
        assert_eq!(codes.len(), 16);
        assert_eq!(codes[0].to_string(), "L,L,L,L");
        assert_eq!(codes[15].to_string(), "H,H,H,H");
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn one_region_base_case() {
        let codes: Vec<String> = enumerate_scenarios(1).iter().map(|c| c.to_string()).collect();
        assert_eq!(codes, vec!["L", "H"]);
    }

    #[test]
    fn code_parse_round_trip() {
        let c: ScenarioCode = "L,H,H,L".parse().unwrap();
        assert_eq!(c.to_string(), "L,H,H,L");
        assert!("L,X".parse::<ScenarioCode>().is_err());
    }

    #[test]
    fn zero_low_increase_gives_unit_eta() {
        let mut net = builtin_garver();
        for r in &mut net.regions {
            r.projected_increase_low_f = 0.0;
        }
        let cfg = ScenarioConfig::default();
        let code = ScenarioCode(vec![Mark::Low; net.regions.len()]);
        let p = realize_scenario(&code, &net, &cfg).unwrap();
        for r in &p.regions {
            assert_eq!(r.eta, 1.0);
            assert_eq!(r.gamma, cfg.elasticity.gamma_low);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let net = builtin_garver();
        let code = ScenarioCode(vec![Mark::Low; net.regions.len() + 1]);
        assert!(matches!(
            realize_scenario(&code, &net, &ScenarioConfig::default()),
            Err(ScenarioError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = ScenarioConfig::from_json(
            r#"{"elasticity": {"gamma_low": 1.01, "gamma_high": 1.08},
                "region_conductors": [{"region_id": 2, "conductor": {
                    "diameter_m": 0.03, "resistance_ohm_per_m": 7e-5, "emissivity": 0.7,
                    "absorptivity": 0.9, "max_conductor_temp_c": 100.0,
                    "heat_transfer_coeff": 12.0, "solar_radiation": 900.0}}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.elasticity.gamma_high, 1.08);
        assert_eq!(cfg.conductor_for(1), &ConductorParams::DRAKE);
        assert_eq!(cfg.conductor_for(2).max_conductor_temp_c, 100.0);
        assert!(ScenarioConfig::from_json(r#"{"elasticity": {"gamma_low": 1.1, "gamma_high": 1.0}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"sigma": 1}"#).is_err());
    }

    proptest! {
        #[test]
        fn flipping_a_mark_is_monotone_and_local(bits in 0u32..4, idx in 0usize..2) {
            let net = builtin_garver();
            let cfg = ScenarioConfig::default();
            let n = net.regions.len();
            let code = enumerate_scenarios(n)[bits as usize % (1 << n)].clone();
            let lo = realize_scenario(&code.with_mark(idx, Mark::Low), &net, &cfg).unwrap();
            let hi = realize_scenario(&code.with_mark(idx, Mark::High), &net, &cfg).unwrap();
            prop_assert!(hi.regions[idx].eta <= lo.regions[idx].eta);
            prop_assert!(hi.regions[idx].gamma >= lo.regions[idx].gamma);
            for j in (0..n).filter(|&j| j != idx) {
                prop_assert_eq!(hi.regions[j], lo.regions[j]);
            }
        }
    }
}
