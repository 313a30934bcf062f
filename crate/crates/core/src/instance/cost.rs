use serde::{Deserialize, Serialize};

use super::InstanceError;

/// Per-kilometre cost rates of one voltage class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostClass {
    pub voltage_kv: f64,
    pub build_per_km: f64,
    pub reconductor_per_km: f64,
    /// Fraction of the capital cost charged per year, in (0, 1].
    pub annualization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostTable {
    pub classes: Vec<CostClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    Build,
    Reconductor,
}

impl CostTable {
    /// Sample rates in $/km for common classes, annualized at 10 %.
    pub fn sample() -> Self {
        let rows = [
            (69.0, 0.6e6, 0.25e6),
            (138.0, 1.0e6, 0.4e6),
            (230.0, 1.4e6, 0.55e6),
            (345.0, 2.0e6, 0.8e6),
            (500.0, 2.8e6, 1.1e6),
        ];
        CostTable {
            classes: rows
                .into_iter()
                .map(|(kv, b, r)| CostClass {
                    voltage_kv: kv,
                    build_per_km: b,
                    reconductor_per_km: r,
                    annualization: 0.1,
                })
                .collect(),
        }
    }

    pub fn class(&self, voltage_kv: f64) -> Option<&CostClass> {
        self.classes
            .iter()
            .find(|c| (c.voltage_kv - voltage_kv).abs() <= 1e-9 * voltage_kv.abs().max(1.0))
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.classes.is_empty() {
            out.push("cost table has no voltage classes".to_string());
        }
        for c in &self.classes {
            if !(c.voltage_kv > 0.0 && c.build_per_km > 0.0 && c.reconductor_per_km > 0.0) {
                out.push(format!("{} kV class: rates and voltage must be positive", c.voltage_kv));
            }
            if !(c.annualization > 0.0 && c.annualization <= 1.0) {
                out.push(format!("{} kV class: annualization must lie in (0, 1]", c.voltage_kv));
            }
        }
        out
    }
}

/// Annualized cost of building or reconductoring `length_km` of line.
pub fn estimate_line_cost(
    voltage_kv: f64,
    length_km: f64,
    table: &CostTable,
    kind: CostKind,
) -> Result<f64, InstanceError> {
    let class = table
        .class(voltage_kv)
        .ok_or(InstanceError::UnknownVoltageClass(voltage_kv))?;
    let rate = match kind {
        CostKind::Build => class.build_per_km,
        CostKind::Reconductor => class.reconductor_per_km,
    };
    Ok(rate * length_km * class.annualization)
}
