//! Best-bound branch and bound with depth-first plunging.
//!
//! Each node re-solves the relaxation from the slack basis with its binary
//! fixings applied. When valid inequalities are enabled, the model's cut pool
//! is separated at every node: violated cuts join a global active set and the
//! node is re-solved until its point satisfies the whole pool.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use log::debug;

use super::clock::Clock;
use super::simplex::{solve_relaxation, LpStatus};
use super::{check_model, verify_point, Solution, SolveOptions, SolveStats, SolveStatus, SolverError};
use crate::milp::{Constraint, Model};

pub(crate) const INT_TOL: f64 = 1e-6;
const CUT_VIOLATION_TOL: f64 = 1e-6;

struct Node {
    bound: f64,
    seq: usize,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound (then oldest) ranks highest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    model: &'a Model,
    opts: &'a SolveOptions,
    binaries: Vec<usize>,
    active_cuts: Vec<usize>,
    is_active: Vec<bool>,
    incumbent: Option<(f64, Vec<f64>)>,
    /// Smallest bound among nodes discarded only because of the gap tolerance.
    gap_pruned_floor: f64,
    stats: SolveStats,
}

enum NodeResult {
    Infeasible,
    Unbounded,
    Solved { objective: f64, x: Vec<f64> },
}

impl<'a> Search<'a> {
    fn bounds_for(&self, fixings: &[(usize, f64)]) -> (Vec<f64>, Vec<f64>) {
        let mut lo: Vec<f64> = self.model.variables.iter().map(|v| v.lower).collect();
        let mut up: Vec<f64> = self.model.variables.iter().map(|v| v.upper).collect();
        for &(j, v) in fixings {
            lo[j] = v;
            up[j] = v;
        }
        (lo, up)
    }

    fn solve_node(&mut self, fixings: &[(usize, f64)]) -> Result<NodeResult, SolverError> {
        let (lo, up) = self.bounds_for(fixings);
        loop {
            let rows: Vec<&Constraint> = self.active_cuts.iter().map(|&k| &self.model.cuts[k]).collect();
            let out = solve_relaxation(self.model, &lo, &up, &rows, self.opts.feas_tol)?;
            self.stats.simplex_iterations += out.iterations;
            match out.status {
                LpStatus::Infeasible => return Ok(NodeResult::Infeasible),
                LpStatus::Unbounded => return Ok(NodeResult::Unbounded),
                LpStatus::Optimal => {}
            }
            if !self.opts.enable_vis {
                return Ok(NodeResult::Solved {
                    objective: out.objective,
                    x: out.x,
                });
            }
            let mut added = 0;
            for (k, cut) in self.model.cuts.iter().enumerate() {
                if !self.is_active[k] && cut.violation(&out.x) > CUT_VIOLATION_TOL {
                    self.is_active[k] = true;
                    self.active_cuts.push(k);
                    added += 1;
                }
            }
            if added == 0 {
                return Ok(NodeResult::Solved {
                    objective: out.objective,
                    x: out.x,
                });
            }
            self.stats.cuts_enforced += added;
        }
    }

    fn prune_threshold(&self) -> f64 {
        match &self.incumbent {
            Some((inc, _)) => inc - self.opts.rel_gap_tol * inc.abs().max(1.0),
            None => f64::INFINITY,
        }
    }

    /// Records a node that will not be explored because of the incumbent.
    fn prune(&mut self, bound: f64) {
        if let Some((inc, _)) = &self.incumbent {
            if bound < *inc {
                self.gap_pruned_floor = self.gap_pruned_floor.min(bound);
            }
        }
    }

    /// Most fractional binary; ties go to the lowest index.
    fn branching_variable(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.binaries {
            let frac = (x[j] - x[j].round()).abs();
            if frac <= INT_TOL {
                continue;
            }
            let dist = (x[j] - 0.5).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Re-solves with the binaries rounded and fixed to get a clean point.
    fn polish(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>), SolverError> {
        let fixings: Vec<(usize, f64)> = self.binaries.iter().map(|&j| (j, x[j].round())).collect();
        let (lo, up) = self.bounds_for(&fixings);
        let cuts: Vec<&Constraint> = if self.opts.enable_vis {
            self.model.cuts.iter().collect()
        } else {
            Vec::new()
        };
        let out = solve_relaxation(self.model, &lo, &up, &cuts, self.opts.feas_tol)?;
        self.stats.simplex_iterations += out.iterations;
        if out.status == LpStatus::Optimal {
            Ok((out.objective, out.x))
        } else {
            Ok((self.model.objective_value(x), x.to_vec()))
        }
    }
}

/// Solves a minimization MILP to the relative gap in `opts`.
///
/// `Optimal` means the returned objective is within `rel_gap_tol` of the
/// proven bound. On a limit the best point found so far (if any) is returned
/// with the corresponding status.
pub fn solve_milp(model: &Model, opts: &SolveOptions) -> Result<Solution, SolverError> {
    opts.check()?;
    check_model(model)?;
    let clock = Clock::start();
    let mut search = Search {
        model,
        opts,
        binaries: model.binary_indices(),
        active_cuts: Vec::new(),
        is_active: vec![false; model.cuts.len()],
        incumbent: None,
        gap_pruned_floor: f64::INFINITY,
        stats: SolveStats::default(),
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut limit_hit: Option<SolveStatus> = None;
    let mut root_unbounded = false;
    // Node to process next without going through the queue (plunge).
    let mut next: Option<Node> = Some(Node {
        bound: f64::NEG_INFINITY,
        seq,
        fixings: Vec::new(),
    });

    loop {
        let node = match next.take() {
            Some(n) => n,
            None => match heap.pop() {
                Some(n) => n,
                None => break,
            },
        };
        if node.bound >= search.prune_threshold() {
            search.prune(node.bound);
            continue;
        }
        if let Some(limit) = opts.node_limit {
            if search.stats.nodes >= limit {
                heap.push(node);
                limit_hit = Some(SolveStatus::NodeLimit);
                break;
            }
        }
        if let Some(t) = opts.time_limit_s {
            if clock.elapsed_s() >= t {
                heap.push(node);
                limit_hit = Some(SolveStatus::TimeLimit);
                break;
            }
        }

        search.stats.nodes += 1;
        let is_root = search.stats.nodes == 1;
        let result = search.solve_node(&node.fixings)?;
        let (objective, x) = match result {
            NodeResult::Infeasible => {
                if is_root {
                    search.stats.root_bound = f64::INFINITY;
                }
                continue;
            }
            NodeResult::Unbounded => {
                if is_root {
                    root_unbounded = true;
                    break;
                }
                // A bounded root cannot have unbounded children.
                return Err(SolverError::Numerical(
                    "unbounded relaxation below a bounded root".into(),
                ));
            }
            NodeResult::Solved { objective, x } => (objective, x),
        };
        if is_root {
            search.stats.root_bound = objective;
        }
        if objective >= search.prune_threshold() {
            search.prune(objective);
            continue;
        }
        match search.branching_variable(&x) {
            None => {
                let (obj, point) = search.polish(&x)?;
                if search.incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc) {
                    debug!("incumbent {obj} at node {}", search.stats.nodes);
                    search.incumbent = Some((obj, point));
                }
            }
            Some(j) => {
                let mut child = |v: f64| {
                    seq += 1;
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    Node {
                        bound: objective,
                        seq,
                        fixings,
                    }
                };
                // Dive toward the rounded value first.
                let (dive, other) = if x[j] >= 0.5 {
                    (child(1.0), child(0.0))
                } else {
                    (child(0.0), child(1.0))
                };
                heap.push(other);
                next = Some(dive);
            }
        }
    }

    search.stats.wall_time_s = clock.elapsed_s();
    let open_floor = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let (status, objective, values) = if root_unbounded {
        (SolveStatus::Unbounded, f64::NEG_INFINITY, Vec::new())
    } else {
        let status = limit_hit.unwrap_or(match search.incumbent {
            Some(_) => SolveStatus::Optimal,
            None => SolveStatus::Infeasible,
        });
        match search.incumbent.take() {
            Some((obj, x)) => (status, obj, x),
            None => (status, f64::INFINITY, Vec::new()),
        }
    };
    let best_bound = match status {
        SolveStatus::Unbounded => f64::NEG_INFINITY,
        SolveStatus::Infeasible => f64::INFINITY,
        _ => objective.min(search.gap_pruned_floor).min(open_floor),
    };
    if !values.is_empty() {
        verify_point(model, &values, opts.enable_vis, opts.feas_tol)?;
    }
    Ok(Solution {
        status,
        objective,
        best_bound,
        values,
        stats: search.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;
    use crate::solver::solve_lp;

    fn knapsack() -> Model {
        // max 5a + 4b + 3c st 2a + 3b + c ≤ 5: {a, b} with value 9.
        let mut m = Model::new("k");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        m.set_objective_coef(a, -5.0);
        m.set_objective_coef(b, -4.0);
        m.set_objective_coef(c, -3.0);
        m.add_constraint(Constraint::new("w", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 5.0));
        m
    }

    #[test]
    fn small_knapsack() {
        let s = solve_milp(&knapsack(), &SolveOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective + 9.0).abs() < 1e-9);
        assert!(s.best_bound <= s.objective + 1e-12);
    }

    #[test]
    fn fixed_binaries_match_lp() {
        let mut m = knapsack();
        for v in m.variables.iter_mut() {
            v.lower = 1.0;
        }
        m.variables[1].lower = 0.0;
        m.variables[1].upper = 0.0;
        let milp = solve_milp(&m, &SolveOptions::default()).unwrap();
        let lp = solve_lp(&m, &SolveOptions::default()).unwrap();
        assert_eq!(milp.objective, lp.objective);
        assert_eq!(milp.stats.nodes, 1);
    }

    #[test]
    fn integer_infeasible() {
        let mut m = Model::new("t");
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint(Constraint::new("r", vec![(a, 2.0), (b, 2.0)], Sense::Eq, 1.0));
        let s = solve_milp(&m, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(!s.has_point());
    }

    #[test]
    fn node_limit_is_honored() {
        let mut m = Model::new("t");
        let x: Vec<usize> = (0..6).map(|i| m.add_binary(format!("x{i}"))).collect();
        let terms: Vec<(usize, f64)> = x.iter().map(|&j| (j, 2.0)).collect();
        for &j in &x {
            m.set_objective_coef(j, -1.0);
        }
        m.add_constraint(Constraint::new("odd", terms, Sense::Le, 7.0));
        let opts = SolveOptions {
            node_limit: Some(2),
            ..Default::default()
        };
        let s = solve_milp(&m, &opts).unwrap();
        assert_eq!(s.status, SolveStatus::NodeLimit);
        assert!(s.stats.nodes <= 2);
        assert!(s.best_bound <= s.objective);
    }
}
