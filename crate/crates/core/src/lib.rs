//! Transmission expansion planning under temperature-driven line derating.
//!
//! The crate covers the whole pipeline: a typed network model, conductor
//! ampacity and temperature trend fitting, high/low scenario realization, the
//! disjunctive DC-flow expansion MILP with path-based valid inequalities, a
//! self-contained simplex and branch-and-bound engine, test instance
//! generators and scenario sweeps with cost reports.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod instance;
pub mod milp;
pub mod network;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod thermal;

pub use network::{load_network, serialize_network, validate, Network};
