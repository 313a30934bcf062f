//! CPLEX-style LP text export.

use std::fmt::Write as _;

use super::model::{Model, VarKind};
use super::mps::fmt_num;

const TERMS_PER_LINE: usize = 8;

fn write_expr(out: &mut String, terms: &[(usize, f64)], model: &Model) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(j, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", fmt_num(c.abs()), model.variables[j].name);
    }
}

pub fn export_lp(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    out.push_str("Minimize\n obj:");
    let obj: Vec<(usize, f64)> = model.objective.terms.iter().copied().filter(|t| t.1 != 0.0).collect();
    write_expr(&mut out, &obj, model);
    if model.objective.constant != 0.0 {
        let c = model.objective.constant;
        let _ = write!(out, " {} {}", if c < 0.0 { '-' } else { '+' }, fmt_num(c.abs()));
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_expr(&mut out, &c.terms, model);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
    }
    if !model.cuts.is_empty() {
        out.push_str("User Cuts\n");
        for c in &model.cuts {
            let _ = write!(out, " {}:", c.name);
            write_expr(&mut out, &c.terms, model);
            let _ = writeln!(out, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
        }
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0 {
            continue;
        }
        match (v.lower, v.upper) {
            (l, u) if l == f64::NEG_INFINITY && u == f64::INFINITY => {
                let _ = writeln!(out, " {} free", v.name);
            }
            (l, u) if l == u => {
                let _ = writeln!(out, " {} = {}", v.name, fmt_num(l));
            }
            (l, u) => {
                let lo = if l == f64::NEG_INFINITY {
                    "-inf".to_string()
                } else {
                    fmt_num(l)
                };
                let up = if u == f64::INFINITY {
                    "+inf".to_string()
                } else {
                    fmt_num(u)
                };
                let _ = writeln!(out, " {lo} <= {} <= {up}", v.name);
            }
        }
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{Constraint, Sense};

    #[test]
    fn small_model_text() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let y = m.add_binary("y");
        m.set_objective_coef(y, 2.0);
        m.add_constraint(Constraint::new("c1", vec![(x, 1.0), (y, -0.5)], Sense::Le, 3.0));
        let text = export_lp(&m);
        assert_eq!(
            text,
            "\\ Problem: t\nMinimize\n obj: + 2 y\nSubject To\n c1: + 1 x - 0.5 y <= 3\nBounds\n x free\nBinaries\n y\nEnd\n"
        );
    }
}
