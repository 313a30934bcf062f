//! Fixed-format MPS writer and a whitespace-tokenizing reader.
//!
//! Names occupy the fixed 8-character fields. Numbers are written with the
//! shortest representation that parses back to the same `f64`; they start in
//! the fixed numeric columns but may run past them. Valid inequalities go in a
//! `USERCUTS` section.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use super::model::{Constraint, Model, Sense, VarKind, Variable};

pub const NAME_WIDTH: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing {0} section")]
    MissingSection(&'static str),
}

fn syntax(line: usize, msg: impl Into<String>) -> MpsError {
    MpsError::Syntax { line, msg: msg.into() }
}

/// Format a number so that `str::parse::<f64>` returns the same value.
pub(crate) fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Maps model names onto unique names that fit the fixed-format field.
struct NameTable {
    used: HashSet<String>,
}

impl NameTable {
    fn new() -> Self {
        NameTable { used: HashSet::new() }
    }

    fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    fn fit(&mut self, name: &str, what: &str) -> String {
        let clean: String = name
            .chars()
            .map(|c| if c.is_ascii_graphic() { c } else { '_' })
            .collect();
        if clean.len() <= NAME_WIDTH && !clean.is_empty() && self.used.insert(clean.clone()) {
            if clean != name {
                warn!("{what} name {name:?} written as {clean:?}");
            }
            return clean;
        }
        for k in 1.. {
            let suffix = format!("~{k}");
            let keep = NAME_WIDTH.saturating_sub(suffix.len());
            let candidate = format!("{}{}", &clean[..clean.len().min(keep)], suffix);
            if self.used.insert(candidate.clone()) {
                warn!("{what} name {name:?} does not fit the MPS field, written as {candidate:?}");
                return candidate;
            }
        }
        unreachable!()
    }
}

fn entry_line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str) {
    let line = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4}");
    let _ = writeln!(out, "{}", line.trim_end());
}

pub fn export_mps(model: &Model) -> String {
    let mut names = NameTable::new();
    let obj_name = ["COST", "OBJ", "OBJECTIV"]
        .into_iter()
        .find(|c| !model.constraints.iter().chain(&model.cuts).any(|r| r.name == *c))
        .unwrap_or("COST~");
    names.reserve(obj_name);
    let row_names: Vec<String> = model
        .constraints
        .iter()
        .chain(&model.cuts)
        .map(|c| names.fit(&c.name, "row"))
        .collect();
    let mut col_names_table = NameTable::new();
    let col_names: Vec<String> = model
        .variables
        .iter()
        .map(|v| col_names_table.fit(&v.name, "column"))
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "NAME          {}", model.name);
    out.push_str("ROWS\n");
    entry_line(&mut out, "N", obj_name, "", "");
    let sense_code = |s: Sense| match s {
        Sense::Le => "L",
        Sense::Ge => "G",
        Sense::Eq => "E",
    };
    let n_rows = model.constraints.len();
    for (c, name) in model.constraints.iter().zip(&row_names) {
        entry_line(&mut out, sense_code(c.sense), name, "", "");
    }
    if !model.cuts.is_empty() {
        out.push_str("USERCUTS\n");
        for (c, name) in model.cuts.iter().zip(&row_names[n_rows..]) {
            entry_line(&mut out, sense_code(c.sense), name, "", "");
        }
    }

    // Column-major entries: objective first, then rows in declaration order.
    let mut columns: Vec<Vec<(&str, f64)>> = vec![Vec::new(); model.variables.len()];
    let mut obj = vec![0.0; model.variables.len()];
    for &(j, c) in &model.objective.terms {
        obj[j] += c;
    }
    for (j, &c) in obj.iter().enumerate() {
        if c != 0.0 {
            columns[j].push((obj_name, c));
        }
    }
    for (c, name) in model.constraints.iter().chain(&model.cuts).zip(&row_names) {
        for &(j, a) in &c.terms {
            columns[j].push((name.as_str(), a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in model.variables.iter().enumerate() {
        let is_int = v.kind == VarKind::Binary;
        if is_int != in_int {
            marker += 1;
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            write_marker(&mut out, marker, tag);
            in_int = is_int;
        }
        if columns[j].is_empty() {
            entry_line(&mut out, "", &col_names[j], obj_name, "0");
        }
        for &(row, a) in &columns[j] {
            entry_line(&mut out, "", &col_names[j], row, &fmt_num(a));
        }
    }
    if in_int {
        marker += 1;
        write_marker(&mut out, marker, "'INTEND'");
    }

    out.push_str("RHS\n");
    if model.objective.constant != 0.0 {
        entry_line(&mut out, "", "RHS", obj_name, &fmt_num(-model.objective.constant));
    }
    for (c, name) in model.constraints.iter().chain(&model.cuts).zip(&row_names) {
        if c.rhs != 0.0 {
            entry_line(&mut out, "", "RHS", name, &fmt_num(c.rhs));
        }
    }

    let mut bounds = String::new();
    for (v, name) in model.variables.iter().zip(&col_names) {
        write_bounds(&mut bounds, v, name);
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    out
}

fn write_marker(out: &mut String, index: usize, tag: &str) {
    let _ = writeln!(
        out,
        "    {:<8}  {:<8}  {:<12}   {}",
        format!("MARKER{index:02}"),
        "'MARKER'",
        "",
        tag
    );
}

fn write_bounds(out: &mut String, v: &Variable, name: &str) {
    let (lo, up) = (v.lower, v.upper);
    let default_up = if v.kind == VarKind::Binary { 1.0 } else { f64::INFINITY };
    if lo == f64::NEG_INFINITY && up == f64::INFINITY {
        entry_line(out, "FR", "BND", name, "");
        return;
    }
    if lo == up {
        entry_line(out, "FX", "BND", name, &fmt_num(lo));
        return;
    }
    if lo == f64::NEG_INFINITY {
        entry_line(out, "MI", "BND", name, "");
    } else if lo != 0.0 {
        entry_line(out, "LO", "BND", name, &fmt_num(lo));
    }
    if up != f64::INFINITY && (up != default_up || v.kind == VarKind::Binary) {
        entry_line(out, "UP", "BND", name, &fmt_num(up));
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Name,
    Rows,
    UserCuts,
    Columns,
    Rhs,
    Bounds,
    ObjSense,
    End,
}

pub fn import_mps(text: &str) -> Result<Model, MpsError> {
    let mut model = Model::default();
    let mut section = Section::Start;
    let mut seen_rows = false;
    let mut seen_columns = false;

    let mut obj_row: Option<String> = None;
    let mut free_rows: HashSet<String> = HashSet::new();
    // Row name -> (is_cut, index).
    let mut row_index: HashMap<String, (bool, usize)> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut integer_cols: HashSet<usize> = HashSet::new();
    let mut bound_set: HashSet<usize> = HashSet::new();
    let mut in_int = false;
    let mut objective: HashMap<usize, f64> = HashMap::new();
    let mut obj_order: Vec<usize> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            section = match tokens[0] {
                "NAME" => {
                    model.name = tokens.get(1).copied().unwrap_or("").to_string();
                    Section::Name
                }
                "ROWS" => {
                    seen_rows = true;
                    Section::Rows
                }
                "USERCUTS" => {
                    if !seen_rows {
                        return Err(MpsError::MissingSection("ROWS"));
                    }
                    Section::UserCuts
                }
                "COLUMNS" => {
                    if !seen_rows {
                        return Err(MpsError::MissingSection("ROWS"));
                    }
                    seen_columns = true;
                    Section::Columns
                }
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "OBJSENSE" => match tokens.get(1) {
                    Some(&"MIN") | Some(&"MINIMIZE") => Section::Name,
                    Some(s) => return Err(syntax(ln, format!("unsupported objective sense {s}"))),
                    None => Section::ObjSense,
                },
                "ENDATA" => Section::End,
                "RANGES" => return Err(syntax(ln, "RANGES section is not supported")),
                other => return Err(syntax(ln, format!("unknown section {other}"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }

        match section {
            Section::Start => return Err(syntax(ln, "data before any section header")),
            Section::Name | Section::End => return Err(syntax(ln, "unexpected data line")),
            Section::ObjSense => {
                if !matches!(tokens[0], "MIN" | "MINIMIZE") {
                    return Err(syntax(ln, format!("unsupported objective sense {}", tokens[0])));
                }
                section = Section::Name;
            }
            Section::Rows | Section::UserCuts => {
                if tokens.len() != 2 {
                    return Err(syntax(ln, "row entry needs a type and a name"));
                }
                let name = tokens[1].to_string();
                if row_index.contains_key(&name) || obj_row.as_deref() == Some(&name) {
                    return Err(syntax(ln, format!("duplicate row {name}")));
                }
                let sense = match tokens[0] {
                    "N" => {
                        if obj_row.is_none() && section == Section::Rows {
                            obj_row = Some(name);
                        } else {
                            free_rows.insert(name);
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(syntax(ln, format!("unknown row type {t}"))),
                };
                let row = Constraint::new(name.clone(), Vec::new(), sense, 0.0);
                if section == Section::Rows {
                    row_index.insert(name, (false, model.constraints.len()));
                    model.constraints.push(row);
                } else {
                    row_index.insert(name, (true, model.cuts.len()));
                    model.cuts.push(row);
                }
            }
            Section::Columns => {
                if tokens.len() >= 3 && tokens[1] == "'MARKER'" {
                    match tokens[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        t => return Err(syntax(ln, format!("unknown marker {t}"))),
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(syntax(ln, "column entry needs 3 or 5 fields"));
                }
                let col = match col_index.get(tokens[0]) {
                    Some(&j) => j,
                    None => {
                        let j = model.add_var(tokens[0], VarKind::Continuous, 0.0, f64::INFINITY);
                        col_index.insert(tokens[0].to_string(), j);
                        if in_int {
                            integer_cols.insert(j);
                        }
                        j
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| syntax(ln, format!("bad number {}", pair[1])))?;
                    let row = pair[0];
                    if obj_row.as_deref() == Some(row) {
                        if !objective.contains_key(&col) {
                            obj_order.push(col);
                        }
                        *objective.entry(col).or_default() += value;
                    } else if let Some(&(cut, i)) = row_index.get(row) {
                        let r = if cut {
                            &mut model.cuts[i]
                        } else {
                            &mut model.constraints[i]
                        };
                        r.terms.push((col, value));
                    } else if !free_rows.contains(row) {
                        return Err(syntax(ln, format!("unknown row {row}")));
                    }
                }
            }
            Section::Rhs => {
                let fields = match tokens.len() {
                    2 | 4 => &tokens[..],
                    3 | 5 => &tokens[1..],
                    _ => return Err(syntax(ln, "rhs entry needs 2 to 5 fields")),
                };
                for pair in fields.chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| syntax(ln, format!("bad number {}", pair[1])))?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        model.objective.constant = -value;
                    } else if let Some(&(cut, i)) = row_index.get(pair[0]) {
                        let r = if cut {
                            &mut model.cuts[i]
                        } else {
                            &mut model.constraints[i]
                        };
                        r.rhs = value;
                    } else if !free_rows.contains(pair[0]) {
                        return Err(syntax(ln, format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Bounds => {
                let kind = tokens[0];
                let needs_value = !matches!(kind, "FR" | "MI" | "PL" | "BV");
                let rest = &tokens[1..];
                let (col_name, value) = match (needs_value, rest.len()) {
                    (true, 3) => (rest[1], Some(rest[2])),
                    (true, 2) => (rest[0], Some(rest[1])),
                    (false, 2) => (rest[1], None),
                    (false, 1) => (rest[0], None),
                    _ => return Err(syntax(ln, "malformed bound entry")),
                };
                let j = *col_index
                    .get(col_name)
                    .ok_or_else(|| syntax(ln, format!("bound on unknown column {col_name}")))?;
                let value = value
                    .map(|v| v.parse::<f64>().map_err(|_| syntax(ln, format!("bad number {v}"))))
                    .transpose()?;
                bound_set.insert(j);
                let var = &mut model.variables[j];
                match (kind, value) {
                    ("UP", Some(v)) => var.upper = v,
                    ("LO", Some(v)) => var.lower = v,
                    ("FX", Some(v)) => {
                        var.lower = v;
                        var.upper = v;
                    }
                    ("FR", None) => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    ("MI", None) => var.lower = f64::NEG_INFINITY,
                    ("PL", None) => var.upper = f64::INFINITY,
                    ("BV", None) => {
                        var.lower = 0.0;
                        var.upper = 1.0;
                        integer_cols.insert(j);
                    }
                    _ => return Err(syntax(ln, format!("unsupported bound type {kind}"))),
                }
            }
        }
    }

    if !seen_rows {
        return Err(MpsError::MissingSection("ROWS"));
    }
    if !seen_columns && !row_index.is_empty() {
        return Err(MpsError::MissingSection("COLUMNS"));
    }
    if section != Section::End {
        return Err(MpsError::MissingSection("ENDATA"));
    }

    let mut ints: Vec<usize> = integer_cols.into_iter().collect();
    ints.sort_unstable();
    for j in ints {
        let var = &mut model.variables[j];
        if !bound_set.contains(&j) {
            var.upper = 1.0;
        }
        if var.lower >= 0.0 && var.upper <= 1.0 {
            var.kind = VarKind::Binary;
        } else {
            return Err(syntax(0, format!("integer column {} is not binary", var.name)));
        }
    }
    model.objective.terms = obj_order.into_iter().map(|j| (j, objective[&j])).collect();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_golden() {
        let mut m = Model::new("one");
        m.add_var("x", VarKind::Continuous, 2.0, 5.0);
        let expected = "\
NAME          one
ROWS
 N  COST
COLUMNS
    x         COST      0
RHS
BOUNDS
 LO BND       x         2
 UP BND       x         5
ENDATA
";
        let text = export_mps(&m);
        assert_eq!(text, expected);
        let back = import_mps(&text).unwrap();
        assert!(back.approx_eq(&m, 0.0));
    }

    #[test]
    fn binaries_sit_inside_markers() {
        let mut m = Model::new("b");
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_binary("y7");
        m.set_objective_coef(y, 3.0);
        m.add_constraint(Constraint::new("c1", vec![(x, 1.0), (y, -2.5)], Sense::Le, 0.0));
        let text = export_mps(&m);
        let start = text.find("'INTORG'").unwrap();
        let y_line = text.find("    y7").unwrap();
        let end = text.find("'INTEND'").unwrap();
        assert!(start < y_line && y_line < end);
        assert!(import_mps(&text).unwrap().approx_eq(&m, 0.0));
    }

    #[test]
    fn missing_rows_is_an_error() {
        let text = "NAME t\nCOLUMNS\n    x  COST  1\nENDATA\n";
        assert_eq!(import_mps(text), Err(MpsError::MissingSection("ROWS")));
    }

    #[test]
    fn long_names_truncate_uniquely() {
        let mut m = Model::new("t");
        m.add_var("flow_line_0001", VarKind::Continuous, 0.0, 1.0);
        m.add_var("flow_line_0002", VarKind::Continuous, 0.0, 1.0);
        let back = import_mps(&export_mps(&m)).unwrap();
        assert_eq!(back.variables[0].name, "flow_l~1");
        assert_eq!(back.variables[1].name, "flow_l~2");
    }

    #[test]
    fn cuts_round_trip_through_usercuts() {
        let mut m = Model::new("c");
        let x = m.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        m.add_constraint(Constraint::new("r", vec![(x, 1.0)], Sense::Ge, -1.0));
        m.cuts
            .push(Constraint::new("v1p", vec![(x, 1.0)], Sense::Le, 0.1 + 0.2));
        m.objective.constant = 4.5;
        let text = export_mps(&m);
        assert!(text.contains("USERCUTS\n"));
        let back = import_mps(&text).unwrap();
        assert_eq!(back.cuts.len(), 1);
        assert_eq!(back.cuts[0].rhs, 0.1 + 0.2);
        assert!(back.approx_eq(&m, 0.0));
    }

    #[test]
    fn number_format_round_trips() {
        for v in [
            1.0,
            -2.5,
            1.0 / 3.0,
            1e-9,
            6.02e23,
            8760.0 * 35.0 * 100.0,
            2.631578947368421,
        ] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
