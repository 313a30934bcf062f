//! Exhaustive enumeration of binary assignments, used as a test oracle.

use super::clock::Clock;
use super::simplex::{solve_relaxation, LpStatus};
use super::{check_model, verify_point, Solution, SolveStats, SolveStatus, SolverError};
use crate::milp::Model;

pub const MAX_BRUTE_FORCE_BINARIES: usize = 24;

const FEAS_TOL: f64 = 1e-7;

/// Solves the LP for every binary assignment and keeps the best.
///
/// Assignments are visited in lexicographic order of the binary vector (in
/// variable index order, 0 before 1) and only a strictly better objective
/// replaces the incumbent, so ties resolve to the lexicographically smallest
/// vector. The cut pool is ignored.
pub fn brute_force_solve(model: &Model) -> Result<Solution, SolverError> {
    check_model(model)?;
    let binaries = model.binary_indices();
    let k = binaries.len();
    if k > MAX_BRUTE_FORCE_BINARIES {
        return Err(SolverError::TooManyBinaries(k));
    }
    let clock = Clock::start();
    let base_lo: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let base_up: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let mut stats = SolveStats::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut unbounded = false;

    for mask in 0u64..(1u64 << k) {
        let mut lo = base_lo.clone();
        let mut up = base_up.clone();
        let mut allowed = true;
        for (pos, &j) in binaries.iter().enumerate() {
            // The first binary is the most significant bit.
            let v = ((mask >> (k - 1 - pos)) & 1) as f64;
            if v < base_lo[j] || v > base_up[j] {
                allowed = false;
                break;
            }
            lo[j] = v;
            up[j] = v;
        }
        if !allowed {
            continue;
        }
        stats.nodes += 1;
        let out = solve_relaxation(model, &lo, &up, &[], FEAS_TOL)?;
        stats.simplex_iterations += out.iterations;
        match out.status {
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => {
                unbounded = true;
                break;
            }
            LpStatus::Optimal => {
                let improves = match &best {
                    None => true,
                    Some((b, _)) => out.objective < b - 1e-9 * b.abs().max(1.0),
                };
                if improves {
                    best = Some((out.objective, out.x));
                }
            }
        }
    }
    stats.wall_time_s = clock.elapsed_s();
    if unbounded {
        return Ok(Solution {
            status: SolveStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            best_bound: f64::NEG_INFINITY,
            values: Vec::new(),
            stats,
        });
    }
    Ok(match best {
        Some((obj, x)) => {
            verify_point(model, &x, false, FEAS_TOL)?;
            stats.root_bound = obj;
            Solution {
                status: SolveStatus::Optimal,
                objective: obj,
                best_bound: obj,
                values: x,
                stats,
            }
        }
        None => Solution {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            values: Vec::new(),
            stats,
        },
    })
}
