use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// A linear row `Σ coef·x  (≤ | = | ≥)  rhs`; terms index into `Model::variables`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(name: impl Into<String>, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` breaks this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Objective {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

/// A minimization MILP over continuous and binary variables.
///
/// `cuts` holds valid inequalities: rows every integer-feasible point already
/// satisfies. Solvers may enforce them or ignore them without changing the
/// optimum.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Model {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub cuts: Vec<Constraint>,
}

/// Result of checking a point against a model, computed directly from the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub max_bound_violation: f64,
    pub max_row_violation: f64,
    pub max_integrality_violation: f64,
    pub worst_row: Option<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_bound_violation <= tol && self.max_row_violation <= tol
    }
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            kind,
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_constraint(&mut self, c: Constraint) -> usize {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn set_objective_coef(&mut self, var: usize, coef: f64) {
        match self.objective.terms.iter_mut().find(|t| t.0 == var) {
            Some(t) => t.1 = coef,
            None => self.objective.terms.push((var, coef)),
        }
    }

    pub fn num_binaries(&self) -> usize {
        self.binary_indices().len()
    }

    pub fn binary_indices(&self) -> Vec<usize> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.constant + self.objective.terms.iter().map(|&(j, c)| c * values[j]).sum::<f64>()
    }

    /// Copy with the cut pool appended to the ordinary constraints.
    pub fn with_cuts_inlined(&self) -> Model {
        let mut m = self.clone();
        m.constraints.append(&mut m.cuts);
        m
    }

    /// Checks variable bounds, rows (and optionally cuts) and integrality.
    pub fn check_point(&self, values: &[f64], include_cuts: bool) -> FeasibilityReport {
        let mut report = FeasibilityReport {
            max_bound_violation: 0.0,
            max_row_violation: 0.0,
            max_integrality_violation: 0.0,
            worst_row: None,
        };
        for (v, &x) in self.variables.iter().zip(values) {
            let viol = (v.lower - x).max(x - v.upper).max(0.0);
            report.max_bound_violation = report.max_bound_violation.max(viol);
            if v.kind == VarKind::Binary {
                let frac = (x - x.round()).abs();
                report.max_integrality_violation = report.max_integrality_violation.max(frac);
            }
        }
        let rows = self.constraints.iter().chain(self.cuts.iter().filter(|_| include_cuts));
        for c in rows {
            let viol = c.violation(values);
            if viol > report.max_row_violation {
                report.max_row_violation = viol;
                report.worst_row = Some(c.name.clone());
            }
        }
        report
    }

    /// Structural problems: dangling term indices, bad binary bounds,
    /// duplicate names, inverted bounds.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.variables.len();
        let mut names: HashMap<&str, usize> = HashMap::new();
        for v in &self.variables {
            *names.entry(&v.name).or_default() += 1;
            if v.kind == VarKind::Binary && !(v.lower >= 0.0 && v.upper <= 1.0) {
                out.push(format!("binary {} has bounds outside [0, 1]", v.name));
            }
            if v.lower > v.upper || v.lower.is_nan() || v.upper.is_nan() {
                out.push(format!("variable {} has invalid bounds", v.name));
            }
        }
        for (name, count) in names {
            if count > 1 {
                out.push(format!("duplicate variable name {name}"));
            }
        }
        let mut row_names: HashMap<&str, usize> = HashMap::new();
        for c in self.constraints.iter().chain(&self.cuts) {
            *row_names.entry(&c.name).or_default() += 1;
            if c.terms.iter().any(|&(j, _)| j >= n) {
                out.push(format!("row {} references an undeclared variable", c.name));
            }
        }
        for (name, count) in row_names {
            if count > 1 {
                out.push(format!("duplicate row name {name}"));
            }
        }
        if self.objective.terms.iter().any(|&(j, _)| j >= n) {
            out.push("objective references an undeclared variable".to_string());
        }
        out.sort();
        out
    }

    /// Structural equality with coefficient, bound and rhs tolerance `tol`
    /// (absolute below 1, relative above).
    pub fn approx_eq(&self, other: &Model, tol: f64) -> bool {
        let close = |a: f64, b: f64| {
            if a == b {
                return true;
            }
            (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
        };
        let terms_eq = |a: &[(usize, f64)], b: &[(usize, f64)]| {
            let (a, b) = (merged_terms(a), merged_terms(b));
            a.len() == b.len() && a.iter().zip(&b).all(|(p, q)| p.0 == q.0 && close(p.1, q.1))
        };
        let rows_eq = |a: &[Constraint], b: &[Constraint]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| {
                    x.name == y.name && x.sense == y.sense && close(x.rhs, y.rhs) && terms_eq(&x.terms, &y.terms)
                })
        };
        self.variables.len() == other.variables.len()
            && self.variables.iter().zip(&other.variables).all(|(a, b)| {
                a.name == b.name && a.kind == b.kind && close(a.lower, b.lower) && close(a.upper, b.upper)
            })
            && rows_eq(&self.constraints, &other.constraints)
            && rows_eq(&self.cuts, &other.cuts)
            && close(self.objective.constant, other.objective.constant)
            && terms_eq(&self.objective.terms, &other.objective.terms)
    }

    pub fn stats(&self) -> ModelStats {
        let mut families: BTreeMap<String, usize> = BTreeMap::new();
        for c in &self.constraints {
            *families.entry(row_family(&c.name).to_string()).or_default() += 1;
        }
        ModelStats {
            name: self.name.clone(),
            variables: self.variables.len(),
            binaries: self.num_binaries(),
            continuous: self.variables.len() - self.num_binaries(),
            constraints: self.constraints.len(),
            equalities: self.constraints.iter().filter(|c| c.sense == Sense::Eq).count(),
            nonzeros: self.constraints.iter().map(|c| c.terms.len()).sum(),
            valid_inequalities: self.cuts.len(),
            row_families: families,
        }
    }
}

/// Terms sorted by variable with duplicates summed and zeros dropped.
fn merged_terms(terms: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for &(j, a) in terms {
        *acc.entry(j).or_default() += a;
    }
    acc.into_iter().filter(|t| t.1 != 0.0).collect()
}

/// Leading alphabetic prefix of a row name.
fn row_family(name: &str) -> &str {
    let end = name.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(name.len());
    &name[..end]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStats {
    pub name: String,
    pub variables: usize,
    pub binaries: usize,
    pub continuous: usize,
    pub constraints: usize,
    pub equalities: usize,
    pub nonzeros: usize,
    pub valid_inequalities: usize,
    pub row_families: BTreeMap<String, usize>,
}

impl ModelStats {
    /// Plain `key value` lines, stable across runs.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model {}", self.name);
        let _ = writeln!(s, "variables {}", self.variables);
        let _ = writeln!(s, "binaries {}", self.binaries);
        let _ = writeln!(s, "continuous {}", self.continuous);
        let _ = writeln!(s, "constraints {}", self.constraints);
        let _ = writeln!(s, "equalities {}", self.equalities);
        let _ = writeln!(s, "nonzeros {}", self.nonzeros);
        let _ = writeln!(s, "valid_inequalities {}", self.valid_inequalities);
        for (family, count) in &self.row_families {
            let _ = writeln!(s, "rows.{family} {count}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violation_by_sense() {
        let c = Constraint::new("c", vec![(0, 1.0), (1, 2.0)], Sense::Le, 3.0);
        assert_eq!(c.violation(&[1.0, 1.0]), 0.0);
        assert_eq!(c.violation(&[2.0, 1.0]), 1.0);
        let e = Constraint {
            sense: Sense::Eq,
            ..c.clone()
        };
        assert_eq!(e.violation(&[0.0, 1.0]), 1.0);
        let g = Constraint { sense: Sense::Ge, ..c };
        assert_eq!(g.violation(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn invariants_catch_dangling_terms_and_duplicates() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0);
        m.add_var("x", VarKind::Binary, 0.0, 2.0);
        m.add_constraint(Constraint::new("r", vec![(x, 1.0), (7, 1.0)], Sense::Le, 1.0));
        let v = m.invariant_violations();
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn stats_group_rows_by_prefix() {
        let mut m = Model::new("t");
        let x = m.add_binary("y1");
        m.add_constraint(Constraint::new("bal1", vec![(x, 1.0)], Sense::Eq, 1.0));
        m.add_constraint(Constraint::new("bal2", vec![(x, 1.0)], Sense::Eq, 1.0));
        let s = m.stats();
        assert_eq!(s.row_families["bal"], 2);
        assert!(s.render().contains("rows.bal 2\n"));
    }
}
