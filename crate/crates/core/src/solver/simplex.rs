//! Dense bounded-variable primal simplex with an explicit basis inverse.
//!
//! Every row `a·x (≤ | = | ≥) rhs` gets a logical column `s = a·x` whose
//! bounds carry the sense, so the working system is `A·x − s = 0` with all
//! restrictions expressed as variable bounds. The slack basis `B = −I` is the
//! starting point. Phase 1 minimizes the sum of bound infeasibilities of the
//! basic variables; phase 2 minimizes the (scaled) objective. Pricing is
//! Dantzig's rule with a two-pass Harris ratio test, switching to Bland's rule
//! after a run of degenerate pivots.

use super::{check_model, verify_point, Solution, SolveOptions, SolveStats, SolveStatus, SolverError};
use crate::milp::{Constraint, Model, Sense};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: LpStatus,
    /// Structural variable values (meaningful when optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the continuous relaxation of `model` (binaries relaxed to [0, 1]).
/// Cuts in the model's pool are ignored.
pub fn solve_lp(model: &Model, opts: &SolveOptions) -> Result<Solution, SolverError> {
    opts.check()?;
    check_model(model)?;
    let clock = super::clock::Clock::start();
    let lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let out = solve_relaxation(model, &lower, &upper, &[], opts.feas_tol)?;
    let stats = SolveStats {
        nodes: 0,
        simplex_iterations: out.iterations,
        wall_time_s: clock.elapsed_s(),
        root_bound: out.objective,
        cuts_enforced: 0,
    };
    Ok(match out.status {
        LpStatus::Optimal => {
            verify_point(model, &out.x, false, opts.feas_tol)?;
            Solution {
                status: SolveStatus::Optimal,
                objective: out.objective,
                best_bound: out.objective,
                values: out.x,
                stats,
            }
        }
        LpStatus::Infeasible => Solution {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            values: Vec::new(),
            stats,
        },
        LpStatus::Unbounded => Solution {
            status: SolveStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            best_bound: f64::NEG_INFINITY,
            values: Vec::new(),
            stats,
        },
    })
}

/// Solves `min c·x` over the model rows plus `extra` rows with variable
/// bounds replaced by `lower`/`upper`.
pub(crate) fn solve_relaxation(
    model: &Model,
    lower: &[f64],
    upper: &[f64],
    extra: &[&Constraint],
    feas_tol: f64,
) -> Result<LpOutcome, SolverError> {
    let n_orig = model.variables.len();
    if lower.iter().zip(upper).any(|(l, u)| l > &(u + feas_tol)) {
        return Ok(infeasible(n_orig, 0));
    }

    // Presolve: drop fixed columns, fold them into row bounds, drop empty rows.
    let mut kept = Vec::new();
    let mut col_of = vec![usize::MAX; n_orig];
    let mut fixed = vec![0.0; n_orig];
    for j in 0..n_orig {
        if upper[j] - lower[j] <= 0.0 {
            fixed[j] = lower[j];
        } else {
            col_of[j] = kept.len();
            kept.push(j);
        }
    }
    let n = kept.len();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut row_lo = Vec::new();
    let mut row_up = Vec::new();
    for c in model.constraints.iter().chain(extra.iter().copied()) {
        let mut constant = 0.0;
        let mut entries = Vec::new();
        for &(j, a) in &c.terms {
            if a == 0.0 {
                continue;
            }
            if col_of[j] == usize::MAX {
                constant += a * fixed[j];
            } else {
                entries.push((col_of[j], a));
            }
        }
        let rhs = c.rhs - constant;
        let (lo, up) = match c.sense {
            Sense::Le => (f64::NEG_INFINITY, rhs),
            Sense::Ge => (rhs, f64::INFINITY),
            Sense::Eq => (rhs, rhs),
        };
        if entries.is_empty() {
            if lo > feas_tol || up < -feas_tol {
                return Ok(infeasible(n_orig, 0));
            }
            continue;
        }
        let r = row_lo.len();
        for (k, a) in entries {
            cols[k].push((r, a));
        }
        row_lo.push(lo);
        row_up.push(up);
    }
    let m = row_lo.len();

    let mut obj = vec![0.0; n];
    for &(j, c) in &model.objective.terms {
        if col_of[j] != usize::MAX {
            obj[col_of[j]] += c;
        }
    }
    let scale = obj.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let mut lo: Vec<f64> = kept.iter().map(|&j| lower[j]).collect();
    let mut up: Vec<f64> = kept.iter().map(|&j| upper[j]).collect();
    lo.extend(&row_lo);
    up.extend(&row_up);
    let mut cost: Vec<f64> = obj.iter().map(|c| c / scale).collect();
    cost.extend(std::iter::repeat_n(0.0, m));
    for i in 0..m {
        cols.push(vec![(i, -1.0)]);
    }

    let mut lp = Simplex::new(m, n, cols, lo, up, cost, feas_tol);
    let status = lp.run()?;
    let mut x = fixed;
    for (k, &j) in kept.iter().enumerate() {
        x[j] = lp.x[k];
    }
    let objective = match status {
        LpStatus::Optimal => model.objective_value(&x),
        LpStatus::Infeasible => f64::INFINITY,
        LpStatus::Unbounded => f64::NEG_INFINITY,
    };
    Ok(LpOutcome {
        status,
        x,
        objective,
        iterations: lp.iterations,
    })
}

fn infeasible(n: usize, iterations: usize) -> LpOutcome {
    LpOutcome {
        status: LpStatus::Infeasible,
        x: vec![0.0; n],
        objective: f64::INFINITY,
        iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic,
    Lower,
    Upper,
    Free,
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Done,
    Unbounded,
}

struct Simplex {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    /// Row-major basis inverse.
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    max_iterations: usize,
    ftol: f64,
}

impl Simplex {
    fn new(
        m: usize,
        n: usize,
        cols: Vec<Vec<(usize, f64)>>,
        lo: Vec<f64>,
        up: Vec<f64>,
        cost: Vec<f64>,
        ftol: f64,
    ) -> Self {
        let total = n + m;
        let mut x = vec![0.0; total];
        let mut state = vec![State::Basic; total];
        for j in 0..n {
            let (s, v) = if lo[j].is_finite() {
                (State::Lower, lo[j])
            } else if up[j].is_finite() {
                (State::Upper, up[j])
            } else {
                (State::Free, 0.0)
            };
            state[j] = s;
            x[j] = v;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = -1.0;
        }
        let mut s = Simplex {
            m,
            cols,
            lo,
            up,
            cost,
            x,
            state,
            basis: (n..total).collect(),
            binv,
            since_refactor: 0,
            iterations: 0,
            max_iterations: 10_000 + 50 * total,
            ftol,
        };
        s.recompute_basic_values();
        s
    }

    fn run(&mut self) -> Result<LpStatus, SolverError> {
        for _ in 0..4 {
            if !self.primal_feasible() {
                self.optimize(Phase::One)?;
                if !self.primal_feasible() {
                    return Ok(LpStatus::Infeasible);
                }
            }
            if let Outcome::Unbounded = self.optimize(Phase::Two)? {
                return Ok(LpStatus::Unbounded);
            }
            self.refactor()?;
            if self.primal_feasible() {
                return Ok(LpStatus::Optimal);
            }
        }
        Err(SolverError::Numerical("lost primal feasibility repeatedly".into()))
    }

    fn primal_feasible(&self) -> bool {
        self.basis
            .iter()
            .all(|&b| self.x[b] >= self.lo[b] - self.ftol && self.x[b] <= self.up[b] + self.ftol)
    }

    /// Solves `B·x_B = −N·x_N` with the current inverse.
    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut r = vec![0.0; m];
        for (j, col) in self.cols.iter().enumerate() {
            if self.state[j] == State::Basic || self.x[j] == 0.0 {
                continue;
            }
            for &(i, a) in col {
                r[i] -= a * self.x[j];
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            self.x[self.basis[p]] = row.iter().zip(&r).map(|(a, b)| a * b).sum();
        }
    }

    /// Rebuilds the basis inverse from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (p, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                b[i * m + p] += a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&a, &bb| b[a * m + c].abs().total_cmp(&b[bb * m + c].abs()))
                .unwrap_or(c);
            if b[piv * m + c].abs() < 1e-12 {
                return Err(SolverError::Numerical("singular basis".into()));
            }
            if piv != c {
                for k in 0..m {
                    b.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = 1.0 / b[c * m + c];
            for k in 0..m {
                b[c * m + k] *= d;
                inv[c * m + k] *= d;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = b[r * m + c];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    b[r * m + k] -= f * b[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basic_values();
        Ok(())
    }

    fn basic_costs(&self, phase: Phase) -> Vec<f64> {
        self.basis
            .iter()
            .map(|&b| match phase {
                Phase::Two => self.cost[b],
                Phase::One => {
                    if self.x[b] < self.lo[b] - self.ftol {
                        -1.0
                    } else if self.x[b] > self.up[b] + self.ftol {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }

    fn optimize(&mut self, phase: Phase) -> Result<Outcome, SolverError> {
        let m = self.m;
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(SolverError::IterationLimit(self.max_iterations));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let cb = self.basic_costs(phase);
            if phase == Phase::One && cb.iter().all(|&c| c == 0.0) {
                return Ok(Outcome::Done);
            }
            let mut y = vec![0.0; m];
            for (p, &c) in cb.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let row = &self.binv[p * m..(p + 1) * m];
                for (yk, a) in y.iter_mut().zip(row) {
                    *yk += c * a;
                }
            }

            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..self.cols.len() {
                let st = self.state[j];
                if st == State::Basic || self.up[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let cj = if phase == Phase::Two { self.cost[j] } else { 0.0 };
                let d = cj - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                let dir = match st {
                    State::Lower if d < -OPT_TOL => 1.0,
                    State::Upper if d > OPT_TOL => -1.0,
                    State::Free if d.abs() > OPT_TOL => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((j, dir)) = entering else {
                return Ok(Outcome::Done);
            };

            let mut alpha = vec![0.0; m];
            for &(i, a) in &self.cols[j] {
                for (p, al) in alpha.iter_mut().enumerate() {
                    *al += self.binv[p * m + i] * a;
                }
            }

            let step = self.ratio_test(phase, j, dir, &alpha, bland);
            let Some((t, leave)) = step else {
                if phase == Phase::One {
                    return Err(SolverError::Numerical("unbounded phase-1 ray".into()));
                }
                return Ok(Outcome::Unbounded);
            };

            self.iterations += 1;
            if t <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            for (p, &al) in alpha.iter().enumerate() {
                if al != 0.0 {
                    self.x[self.basis[p]] -= dir * t * al;
                }
            }
            self.x[j] += dir * t;
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    if dir > 0.0 {
                        self.x[j] = self.up[j];
                        self.state[j] = State::Upper;
                    } else {
                        self.x[j] = self.lo[j];
                        self.state[j] = State::Lower;
                    }
                }
                Some((p, at_upper)) => {
                    let b = self.basis[p];
                    if at_upper {
                        self.x[b] = self.up[b];
                        self.state[b] = State::Upper;
                    } else {
                        self.x[b] = self.lo[b];
                        self.state[b] = State::Lower;
                    }
                    self.state[j] = State::Basic;
                    self.basis[p] = j;
                    self.pivot(p, &alpha);
                }
            }
        }
    }

    /// Returns the step length and the leaving position (with the bound it
    /// leaves at), or `None` for the leaving position on a bound flip. `None`
    /// overall means the ray is unbounded.
    #[allow(clippy::type_complexity)]
    fn ratio_test(
        &self,
        phase: Phase,
        j: usize,
        dir: f64,
        alpha: &[f64],
        bland: bool,
    ) -> Option<(f64, Option<(usize, bool)>)> {
        let tol = if bland { 0.0 } else { self.ftol };
        // (position, exact ratio, leaves at upper)
        let mut limits: Vec<(usize, f64, bool)> = Vec::new();
        let mut t_max = f64::INFINITY;
        for (p, &al) in alpha.iter().enumerate() {
            if al.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[p];
            let (xb, l, u) = (self.x[b], self.lo[b], self.up[b]);
            let delta = -dir * al;
            let below = phase == Phase::One && xb < l - self.ftol;
            let above = phase == Phase::One && xb > u + self.ftol;
            let (exact, relaxed, at_upper) = if delta > 0.0 {
                if below {
                    ((l - xb) / delta, (l - xb) / delta, false)
                } else if above || u == f64::INFINITY {
                    continue;
                } else {
                    ((u - xb) / delta, (u + tol - xb) / delta, true)
                }
            } else if above {
                ((u - xb) / delta, (u - xb) / delta, true)
            } else if below || l == f64::NEG_INFINITY {
                continue;
            } else {
                ((l - xb) / delta, (l - tol - xb) / delta, false)
            };
            t_max = t_max.min(relaxed.max(0.0));
            limits.push((p, exact.max(0.0), at_upper));
        }
        let range = self.up[j] - self.lo[j];
        if range.is_finite() && range <= t_max {
            return Some((range, None));
        }
        if t_max == f64::INFINITY {
            return None;
        }
        let mut chosen: Option<(usize, f64, bool)> = None;
        for &(p, r, at_upper) in &limits {
            if r > t_max {
                continue;
            }
            let better = match chosen {
                None => true,
                Some((q, rq, _)) => {
                    if bland {
                        r < rq || (r == rq && self.basis[p] < self.basis[q])
                    } else {
                        alpha[p].abs() > alpha[q].abs()
                    }
                }
            };
            if better {
                chosen = Some((p, r, at_upper));
            }
        }
        let (p, r, at_upper) = chosen?;
        Some((r, Some((p, at_upper))))
    }

    fn pivot(&mut self, p: usize, alpha: &[f64]) {
        let m = self.m;
        let inv_piv = 1.0 / alpha[p];
        for k in 0..m {
            self.binv[p * m + k] *= inv_piv;
        }
        let (before, rest) = self.binv.split_at_mut(p * m);
        let (prow, after) = rest.split_at_mut(m);
        for (q, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[q];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        for (off, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[p + 1 + off];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        self.since_refactor += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn bound_attained_minimum() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, 2.0, 5.0);
        m.set_objective_coef(x, 1.0);
        let s = solve_lp(&m, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, 2.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        m.add_constraint(Constraint::new("a", vec![(x, 1.0)], Sense::Ge, 1.0));
        m.add_constraint(Constraint::new("b", vec![(x, 1.0)], Sense::Le, 0.0));
        assert_eq!(solve_lp(&m, &opts()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray_detected() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY);
        m.set_objective_coef(x, -1.0);
        m.add_constraint(Constraint::new("a", vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0));
        assert_eq!(solve_lp(&m, &opts()).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn small_production_lp() {
        // max 3x + 5y st x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY);
        m.set_objective_coef(x, -3.0);
        m.set_objective_coef(y, -5.0);
        m.add_constraint(Constraint::new("a", vec![(x, 1.0)], Sense::Le, 4.0));
        m.add_constraint(Constraint::new("b", vec![(y, 2.0)], Sense::Le, 12.0));
        m.add_constraint(Constraint::new("c", vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0));
        let s = solve_lp(&m, &opts()).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9 && (s.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_free_variables() {
        // x free, y ≥ 0, x + y = 3, x - y ≥ -1, min 2x + y → x = 1, y = 2.
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let y = m.add_var("y", VarKind::Continuous, 0.0, f64::INFINITY);
        m.set_objective_coef(x, 2.0);
        m.set_objective_coef(y, 1.0);
        m.add_constraint(Constraint::new("e", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0));
        m.add_constraint(Constraint::new("g", vec![(x, 1.0), (y, -1.0)], Sense::Ge, -1.0));
        let s = solve_lp(&m, &opts()).unwrap();
        assert!((s.objective - 4.0).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn fixed_variables_fold_into_rows() {
        let mut m = Model::new("t");
        let x = m.add_var("x", VarKind::Continuous, 2.0, 2.0);
        let y = m.add_var("y", VarKind::Continuous, 0.0, 10.0);
        m.set_objective_coef(y, 1.0);
        m.add_constraint(Constraint::new("r", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 5.0));
        m.add_constraint(Constraint::new("empty", vec![(x, 1.0)], Sense::Le, 3.0));
        let s = solve_lp(&m, &opts()).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert_eq!(s.values[0], 2.0);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, known to cycle under naive Dantzig pricing.
        let mut m = Model::new("beale");
        let v: Vec<usize> = (0..4)
            .map(|i| m.add_var(format!("x{i}"), VarKind::Continuous, 0.0, f64::INFINITY))
            .collect();
        for (j, c) in [-0.75, 150.0, -0.02, 6.0].into_iter().enumerate() {
            m.set_objective_coef(v[j], c);
        }
        m.add_constraint(Constraint::new(
            "r1",
            vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)],
            Sense::Le,
            0.0,
        ));
        m.add_constraint(Constraint::new(
            "r2",
            vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)],
            Sense::Le,
            0.0,
        ));
        m.add_constraint(Constraint::new("r3", vec![(v[2], 1.0)], Sense::Le, 1.0));
        let s = solve_lp(&m, &opts()).unwrap();
        assert!((s.objective + 0.05).abs() < 1e-9, "{}", s.objective);
    }
}
