//! Reading and writing `variable value` solution files, for cross-checking
//! against external solvers.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::milp::Model;

#[derive(Debug, Error, PartialEq)]
pub enum SolFileError {
    #[error("line {0}: expected `name value`")]
    Malformed(usize),
    #[error("line {line}: bad number {text:?}")]
    BadNumber { line: usize, text: String },
    #[error("variable {0} is listed twice")]
    Duplicate(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
}

/// Parses `name value` lines. Blank lines and lines starting with `#` are skipped.
pub fn read_solution_values(text: &str) -> Result<BTreeMap<String, f64>, SolFileError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(value), None) = (it.next(), it.next(), it.next()) else {
            return Err(SolFileError::Malformed(i + 1));
        };
        let v: f64 = value.parse().map_err(|_| SolFileError::BadNumber {
            line: i + 1,
            text: value.to_string(),
        })?;
        if out.insert(name.to_string(), v).is_some() {
            return Err(SolFileError::Duplicate(name.to_string()));
        }
    }
    Ok(out)
}

pub fn write_solution_values(model: &Model, values: &[f64]) -> String {
    let mut s = String::new();
    for (v, x) in model.variables.iter().zip(values) {
        s.push_str(&format!("{} {}\n", v.name, x));
    }
    s
}

/// Dense value vector for `model`; variables missing from the file are 0.
pub fn values_for_model(model: &Model, named: &BTreeMap<String, f64>) -> Result<Vec<f64>, SolFileError> {
    let index = model.name_index();
    let mut x = vec![0.0; model.variables.len()];
    for (name, &v) in named {
        let j = index
            .get(name.as_str())
            .ok_or_else(|| SolFileError::UnknownVariable(name.clone()))?;
        x[*j] = v;
    }
    Ok(x)
}
