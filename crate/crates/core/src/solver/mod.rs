//! LP simplex, branch-and-bound and exhaustive-enumeration solvers over
//! [`crate::milp::Model`].

mod bnb;
mod brute;
mod clock;
mod simplex;
pub mod solfile;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::Model;

pub use bnb::solve_milp;
pub use brute::{brute_force_solve, MAX_BRUTE_FORCE_BINARIES};
pub use simplex::solve_lp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rel_gap_tol: f64,
    pub feas_tol: f64,
    pub time_limit_s: Option<f64>,
    pub node_limit: Option<usize>,
    /// Enforce the model's valid-inequality pool during branch and bound.
    pub enable_vis: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_gap_tol: 1e-6,
            feas_tol: 1e-7,
            time_limit_s: None,
            node_limit: None,
            enable_vis: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NodeLimit => "node_limit",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: usize,
    pub simplex_iterations: usize,
    pub wall_time_s: f64,
    /// Objective of the root relaxation (after cut separation when enabled).
    pub root_bound: f64,
    /// Valid inequalities that were violated at some node and enforced.
    pub cuts_enforced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective of the returned point; `+inf` when there is none.
    pub objective: f64,
    pub best_bound: f64,
    /// One value per model variable; empty when there is no point.
    pub values: Vec<f64>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn relative_gap(&self) -> f64 {
        (self.objective - self.best_bound) / self.objective.abs().max(1.0)
    }

    pub fn values_by_name(&self, model: &Model) -> BTreeMap<String, f64> {
        model
            .variables
            .iter()
            .zip(&self.values)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }

    pub fn value(&self, var: usize) -> Option<f64> {
        self.values.get(var).copied()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0} binaries exceed the enumeration limit of {MAX_BRUTE_FORCE_BINARIES}")]
    TooManyBinaries(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid options: {0}")]
    InvalidOptions(&'static str),
}

impl SolveOptions {
    fn check(&self) -> Result<(), SolverError> {
        if !(self.rel_gap_tol >= 0.0) {
            return Err(SolverError::InvalidOptions("rel_gap_tol must be nonnegative"));
        }
        if !(self.feas_tol > 0.0) {
            return Err(SolverError::InvalidOptions("feas_tol must be positive"));
        }
        if matches!(self.time_limit_s, Some(t) if !(t > 0.0)) {
            return Err(SolverError::InvalidOptions("time limit must be positive"));
        }
        if self.node_limit == Some(0) {
            return Err(SolverError::InvalidOptions("node limit must be positive"));
        }
        Ok(())
    }
}

fn check_model(model: &Model) -> Result<(), SolverError> {
    let problems = model.invariant_violations();
    match problems.first() {
        Some(p) => Err(SolverError::InvalidModel(p.clone())),
        None => Ok(()),
    }
}

/// Final independent check of a returned point against the model rows and bounds.
fn verify_point(model: &Model, values: &[f64], include_cuts: bool, tol: f64) -> Result<(), SolverError> {
    let report = model.check_point(values, include_cuts);
    if report.is_feasible(tol) {
        Ok(())
    } else {
        Err(SolverError::Numerical(format!(
            "returned point violates bounds by {:.3e} and rows by {:.3e} (worst row {})",
            report.max_bound_violation,
            report.max_row_violation,
            report.worst_row.as_deref().unwrap_or("-")
        )))
    }
}
