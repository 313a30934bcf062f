//! Solver-agnostic MILP model, the expansion-planning builder and file formats.

pub mod build;
pub mod lp_format;
pub mod model;
pub mod mps;
pub mod vi;

pub use build::{big_m, build_tep_model, BuildError, BuildOptions, VariableMap, DEFAULT_SIGMA_HOURS};
pub use lp_format::export_lp;
pub use model::{Constraint, FeasibilityReport, Model, ModelStats, Objective, Sense, VarKind, Variable};
pub use mps::{export_mps, import_mps, MpsError};
pub use vi::{generate_valid_inequalities, ValidInequality};
