//! Path-based valid inequalities bounding the angle difference between the
//! endpoints of a path by the capacity-reactance products of its lines.
//!
//! For a line `l` with multiplier `η_l` the capacity-reactance product is
//! `cr_l = η_l·P̄_l / b_l` (base rating) and `ĉr_l` the same with the
//! reconductored rating `P̄⁰ + P̄¹` where the line is expandable. For a path ρ
//! and a distinguished expandable line (i, j) on it:
//!
//! * `CR(ρ∖(i,j)) = Σ_{l≠ij} ĉr_l + cr_ij`, the path rating with (i, j) left
//!   at its base conductor,
//! * `CR(ρ) = Σ ĉr_l`, every expandable line reconductored,
//! * `C̄R(ρ) = Σ max(ĉr_l, θ̄)`, the bound that survives when candidate lines
//!   on the path are unbuilt (an unbuilt corridor is only held by `θ̄`).
//!
//! The inequality is
//! `|θ_n − θ_m| ≤ CR(ρ∖(i,j)) + (C̄R(ρ) − CR(ρ∖(i,j)))·(N_e − Σ y) + (CR(ρ) − CR(ρ∖(i,j)))·z_ij`
//! where `N_e` counts candidate lines on ρ. Paths without expandable lines
//! drop the `z` term and use `CR(ρ)` in place of `CR(ρ∖(i,j))`.

use std::collections::BTreeSet;

use super::build::{line_etas, BuildError, VariableMap};
use super::model::{Constraint, Sense};
use crate::network::{enumerate_simple_paths, LineId, Network, Path};
use crate::scenario::ScenarioParams;

/// One generated inequality and the path sums behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidInequality {
    pub path: Path,
    /// The distinguished reconductorable line, if the path has one.
    pub expandable: Option<LineId>,
    /// `CR(ρ∖(i,j))`, or `CR(ρ)` when there is no distinguished line.
    pub cr_without: f64,
    pub cr_full: f64,
    pub cr_relaxed: f64,
    pub candidates_on_path: usize,
    pub constraint: Constraint,
}

pub fn generate_valid_inequalities(
    net: &Network,
    params: &ScenarioParams,
    max_path_edges: usize,
    vars: &VariableMap,
) -> Result<Vec<ValidInequality>, BuildError> {
    let etas = line_etas(net, params)?;
    let base = net.base_mva;
    let theta_max = net.max_angle_rad;

    struct Rating {
        cr: f64,
        cr_expanded: f64,
        candidate: bool,
        expandable: bool,
    }
    let rating = |id: LineId| {
        let l = net.line(id).expect("path line exists");
        let eta = etas[&id];
        let cr = eta * l.base_capacity_mw / base / l.susceptance_pu;
        let cr_expanded = if l.is_expandable() {
            eta * (l.base_capacity_mw + l.expansion_capacity_mw) / base / l.susceptance_pu
        } else {
            cr
        };
        Rating {
            cr,
            cr_expanded,
            candidate: l.is_candidate(),
            expandable: l.is_expandable(),
        }
    };

    let mut seen: BTreeSet<(u32, u32, Vec<LineId>, Option<LineId>)> = BTreeSet::new();
    let mut out = Vec::new();
    for path in enumerate_simple_paths(net, max_path_edges.max(2)) {
        let ratings: Vec<Rating> = path.lines.iter().map(|&id| rating(id)).collect();
        let cr_full: f64 = ratings.iter().map(|r| r.cr_expanded).sum();
        let cr_relaxed: f64 = ratings.iter().map(|r| r.cr_expanded.max(theta_max)).sum();
        let candidates: Vec<LineId> = path
            .lines
            .iter()
            .zip(&ratings)
            .filter(|(_, r)| r.candidate)
            .map(|(&id, _)| id)
            .collect();
        let expandables: Vec<(LineId, &Rating)> = path
            .lines
            .iter()
            .zip(&ratings)
            .filter(|(_, r)| r.expandable)
            .map(|(&id, r)| (id, r))
            .collect();

        let mut line_set = path.lines.clone();
        line_set.sort_unstable();

        let distinguished: Vec<Option<(LineId, &Rating)>> = if expandables.is_empty() {
            vec![None]
        } else {
            expandables.into_iter().map(Some).collect()
        };
        for d in distinguished {
            let key = (path.start(), path.end(), line_set.clone(), d.map(|x| x.0));
            if !seen.insert(key) {
                continue;
            }
            let cr_without = match d {
                Some((_, r)) => cr_full - r.cr_expanded + r.cr,
                None => cr_full,
            };
            let big = cr_relaxed - cr_without;
            let z_coef = cr_full - cr_without;
            for (sign, suffix) in [(1.0, 'p'), (-1.0, 'n')] {
                let mut terms = vec![(vars.angle[&path.start()], sign), (vars.angle[&path.end()], -sign)];
                for c in &candidates {
                    terms.push((vars.build[c], big));
                }
                if let Some((id, _)) = d {
                    terms.push((vars.expand[&id], -z_coef));
                }
                let rhs = cr_without + big * candidates.len() as f64;
                out.push(ValidInequality {
                    path: path.clone(),
                    expandable: d.map(|x| x.0),
                    cr_without,
                    cr_full,
                    cr_relaxed,
                    candidates_on_path: candidates.len(),
                    constraint: Constraint::new(format!("v{}{}", out.len() / 2 + 1, suffix), terms, Sense::Le, rhs),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::build::{build_tep_model, BuildOptions};
    use crate::network::tests::{bus, region, simple_line};
    use crate::network::{FuelClass, Generator, LineKind};

    fn chain() -> Network {
        Network {
            regions: vec![region(1)],
            buses: vec![bus(1, 0.0), bus(2, 0.0), bus(3, 80.0)],
            generators: vec![Generator {
                id: 1,
                bus_id: 1,
                capacity_mw: 200.0,
                cost_per_mwh: 10.0,
                fuel_class: FuelClass::Hydro,
            }],
            lines: vec![simple_line(1, 1, 2), simple_line(2, 2, 3)],
            base_mva: 100.0,
            max_angle_rad: 1.0,
        }
    }

    #[test]
    fn all_existing_path_bounds_by_summed_line_limits() {
        let net = chain();
        let params = ScenarioParams::unit(&net);
        let (_, vars) = build_tep_model(&net, &params, &BuildOptions::default()).unwrap();
        let vis = generate_valid_inequalities(&net, &params, 3, &vars).unwrap();
        assert_eq!(vis.len(), 2);
        // Each line: |Δθ| = |P|/b ≤ (100/100)/5 = 0.2.
        for vi in &vis {
            assert!((vi.constraint.rhs - 0.4).abs() < 1e-15);
            assert_eq!(vi.constraint.terms.len(), 2);
        }
    }

    #[test]
    fn built_candidate_cancels_the_relaxation_term() {
        let mut net = chain();
        net.lines[1].kind = LineKind::Candidate;
        net.lines[1].build_cost = 1.0;
        net.buses[1].demand_mw = 80.0;
        net.buses[2].demand_mw = 0.0;
        let params = ScenarioParams::unit(&net);
        let (_, vars) = build_tep_model(&net, &params, &BuildOptions::default()).unwrap();
        let vis = generate_valid_inequalities(&net, &params, 2, &vars).unwrap();
        let c = &vis[0].constraint;
        // θ1 - θ3 + big·y ≤ CR + big: at y = 1 this is θ1 - θ3 ≤ CR.
        let y = vars.build[&2];
        let big = c.terms.iter().find(|t| t.0 == y).unwrap().1;
        assert!((c.rhs - big - 0.4).abs() < 1e-12);
        assert!((vis[0].cr_relaxed - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expandable_line_gets_its_own_pair() {
        let mut net = chain();
        net.lines[0].expandable = true;
        net.lines[0].expansion_capacity_mw = 50.0;
        net.lines[0].expand_cost = 1.0;
        let params = ScenarioParams::unit(&net);
        let (_, vars) = build_tep_model(&net, &params, &BuildOptions::default()).unwrap();
        let vis = generate_valid_inequalities(&net, &params, 2, &vars).unwrap();
        assert_eq!(vis.len(), 2);
        let vi = &vis[0];
        assert_eq!(vi.expandable, Some(1));
        assert!((vi.cr_without - 0.4).abs() < 1e-12);
        assert!((vi.cr_full - 0.5).abs() < 1e-12);
        let z = vars.expand[&1];
        let zc = vi.constraint.terms.iter().find(|t| t.0 == z).unwrap().1;
        assert!((zc + 0.1).abs() < 1e-12);
    }
}
