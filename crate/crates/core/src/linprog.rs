//! Dense two-phase simplex for small linear programs.
//!
//! Problems are stated as `maximize cᵀz subject to Gz ≤ h` with every
//! variable free in sign. Internally each variable is split as `z = z⁺ − z⁻`,
//! slack columns are added, and rows with negative right-hand side get an
//! artificial column for phase one. Pivoting uses Bland's rule throughout,
//! so degenerate problems (common for polygon LPs) cannot cycle.

use crate::error::{domain, Result};

/// Minimum magnitude for a tableau entry to be used as a pivot.
pub const PIVOT_TOL: f64 = 1e-11;
/// Slack allowed on constraint satisfaction and on the phase-one objective.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    /// Builds `maximize objective·z s.t. row·z ≤ rhs` for each `(row, rhs)`.
    pub fn new(objective: Vec<f64>, constraints: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return domain("linear program needs at least one variable");
        }
        if constraints.is_empty() {
            return domain("linear program needs at least one constraint");
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return domain("objective has a non-finite coefficient");
        }
        let mut rows = Vec::with_capacity(constraints.len());
        let mut rhs = Vec::with_capacity(constraints.len());
        for (i, (row, h)) in constraints.into_iter().enumerate() {
            if row.len() != n {
                return domain(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    row.len()
                ));
            }
            if !h.is_finite() || row.iter().any(|g| !g.is_finite()) {
                return domain(format!("constraint {i} has a non-finite entry"));
            }
            rows.push(row);
            rhs.push(h);
        }
        Ok(Self {
            objective,
            rows,
            rhs,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraint(&self, i: usize) -> (&[f64], f64) {
        (&self.rows[i], self.rhs[i])
    }

    /// Largest violation `max(0, gᵢ·z − hᵢ)` scaled by `1 + |hᵢ|`.
    pub fn max_scaled_violation(&self, z: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(g, h)| {
                let lhs: f64 = g.iter().zip(z).map(|(a, b)| a * b).sum();
                ((lhs - h) / (1.0 + h.abs())).max(0.0)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; empty unless `status == Optimal`.
    pub z: Vec<f64>,
    /// `cᵀz` at the optimum; NaN unless optimal.
    pub objective_value: f64,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            z: Vec::new(),
            objective_value: f64::NAN,
        }
    }
}

struct Tableau {
    /// Row-major `m × (cols + 1)`; the last column holds the right-hand side.
    data: Vec<f64>,
    m: usize,
    cols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.data[r * w + j];
                self.data[i * w + j] -= f * v;
            }
            self.data[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut rc = cost[j];
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                rc -= cb * self.at(i, j);
            }
        }
        rc
    }

    /// Maximizes `cost·x` over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        // Bland's rule terminates, the cap only guards against float trouble.
        let max_iter = 50 * (self.m + self.cols).max(10);
        for _ in 0..max_iter {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j) > PIVOT_TOL);
            let Some(c) = entering else { return true };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        true
    }
}

/// Solves the program. Infeasible and unbounded problems are reported through
/// [`LpStatus`], never as errors.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.n_vars();
    let m = lp.n_constraints();
    let n_art = lp.rhs.iter().filter(|h| **h < 0.0).count();
    let structural = 2 * n + m;
    let cols = structural + n_art;
    let w = cols + 1;

    let mut data = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut next_art = structural;
    for i in 0..m {
        let sign = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut data[i * w..(i + 1) * w];
        for (k, g) in lp.rows[i].iter().enumerate() {
            row[k] = sign * g;
            row[n + k] = -sign * g;
        }
        row[2 * n + i] = sign;
        row[cols] = sign * lp.rhs[i];
        if sign < 0.0 {
            row[next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        } else {
            basis[i] = 2 * n + i;
        }
    }
    let mut tab = Tableau {
        data,
        m,
        cols,
        basis,
    };

    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        for c in cost.iter_mut().skip(structural) {
            *c = -1.0;
        }
        tab.optimize(&cost, cols);
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= structural)
            .map(|i| tab.rhs(i))
            .sum();
        let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |a, h| a.max(h.abs()));
        if infeas > FEAS_TOL * scale {
            return LpSolution::without_point(LpStatus::Infeasible);
        }
        // Drive remaining zero-level artificials out of the basis.
        for i in 0..m {
            if tab.basis[i] >= structural {
                if let Some(j) = (0..structural)
                    .filter(|j| !tab.basis.contains(j))
                    .max_by(|&a, &b| tab.at(i, a).abs().total_cmp(&tab.at(i, b).abs()))
                {
                    if tab.at(i, j).abs() > PIVOT_TOL {
                        tab.pivot(i, j);
                    }
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for k in 0..n {
        cost[k] = lp.objective[k];
        cost[n + k] = -lp.objective[k];
    }
    if !tab.optimize(&cost, structural) {
        return LpSolution::without_point(LpStatus::Unbounded);
    }

    let mut split = vec![0.0; cols];
    for i in 0..m {
        split[tab.basis[i]] = tab.rhs(i);
    }
    let z: Vec<f64> = (0..n).map(|k| split[k] - split[n + k]).collect();
    let objective_value = z.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    LpSolution {
        status: LpStatus::Optimal,
        z,
        objective_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_upper_bound() {
        let lp = LinearProgram::new(vec![1.0], vec![(vec![1.0], 1.0)]).unwrap();
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.z[0] - 1.0).abs() < 1e-12);
        assert!((s.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_lp_of_unit_square() {
        // variables (x, y, rho); edges with unit outward normals
        let lp = LinearProgram::new(
            vec![0.0, 0.0, 1.0],
            vec![
                (vec![0.0, -1.0, 1.0], 0.0),
                (vec![1.0, 0.0, 1.0], 1.0),
                (vec![0.0, 1.0, 1.0], 1.0),
                (vec![-1.0, 0.0, 1.0], 0.0),
            ],
        )
        .unwrap();
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reports_unbounded() {
        let lp = LinearProgram::new(vec![1.0, 0.0], vec![(vec![0.0, 1.0], 1.0)]).unwrap();
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn reports_infeasible() {
        let lp =
            LinearProgram::new(vec![1.0], vec![(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap();
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // maximize -x s.t. x >= 2, x <= 5  -> x = 2
        let lp =
            LinearProgram::new(vec![-1.0], vec![(vec![-1.0], -2.0), (vec![1.0], 5.0)]).unwrap();
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.z[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed_programs() {
        assert!(LinearProgram::new(vec![], vec![(vec![], 1.0)]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![(vec![1.0, 2.0], 1.0)]).is_err());
        assert!(LinearProgram::new(vec![f64::NAN], vec![(vec![1.0], 1.0)]).is_err());
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Several constraints active at the optimum (1, 1).
        let lp = LinearProgram::new(
            vec![1.0, 1.0],
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![0.0, 1.0], 1.0),
                (vec![1.0, 1.0], 2.0),
                (vec![2.0, 1.0], 3.0),
                (vec![1.0, 2.0], 3.0),
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, -1.0], 0.0),
            ],
        )
        .unwrap();
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }
}
