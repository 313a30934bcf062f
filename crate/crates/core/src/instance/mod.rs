//! Test networks and the estimation helpers used to assemble planning cases.

mod cost;
mod garver;
mod ingest;
mod load;
mod synth;

use thiserror::Error;

pub use cost::{estimate_line_cost, CostClass, CostKind, CostTable};
pub use garver::{builtin_garver, GARVER_TOTAL_DEMAND_MW};
pub use ingest::{ingest_network, IngestConfig};
pub use load::{disaggregate_load, LOAD_QUANTUM_MW};
pub use synth::{
    default_voltage_classes, synthesize_grid, CandidateRules, SynthesisConfig, VoltageClass, CHORD_FRACTION,
    GENERATION_HEADROOM,
};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("no cost class for {0} kV")]
    UnknownVoltageClass(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Csv(String),
    #[error("assembled network is invalid: {0}")]
    Invalid(String),
}
