//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for desk-scale problems (a few dozen rows and columns). The public
//! entry point is [`lp_maximize`] over `{x : A x <= b}` with free variables;
//! the V-polytope routines use the standard-form engine directly.

use crate::error::{Error, Result};
use crate::vector::{ExtReal, Vector};

/// Entries with magnitude at or below this are treated as zero when choosing
/// pivots and reduced costs.
pub const PIVOT_TOL: f64 = 1e-10;

/// Constraint violation allowed in an optimal solution of [`lp_maximize`].
pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, argmax: Vector },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Unbounded => LpStatus::Unbounded,
            LpOutcome::Infeasible => LpStatus::Infeasible,
        }
    }

    /// Optimal value, `+∞` when unbounded, `None` when infeasible.
    pub fn value(&self) -> Option<ExtReal> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(ExtReal::Finite(*value)),
            LpOutcome::Unbounded => Some(ExtReal::PosInf),
            LpOutcome::Infeasible => None,
        }
    }

    pub fn argmax(&self) -> Option<&Vector> {
        match self {
            LpOutcome::Optimal { argmax, .. } => Some(argmax),
            _ => None,
        }
    }
}

/// Maximizes `⟨c, x⟩` subject to `A x <= b` with `x` unrestricted in sign.
pub fn lp_maximize(c: &Vector, a: &[Vector], b: &[f64]) -> Result<LpOutcome> {
    let n = c.dim();
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    for row in a {
        row.check_dim(n)?;
    }
    if let Some((index, &value)) = b.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }

    // x = x⁺ − x⁻, one slack per row: [A | −A | I] z = b, z >= 0.
    let m = a.len();
    let cols = 2 * n + m;
    let rows: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = Vec::with_capacity(cols);
            r.extend_from_slice(row.as_slice());
            r.extend(row.as_slice().iter().map(|v| -v));
            r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    let mut cost = Vec::with_capacity(cols);
    cost.extend_from_slice(c.as_slice());
    cost.extend(c.as_slice().iter().map(|v| -v));
    cost.extend(std::iter::repeat_n(0.0, m));

    Ok(match solve_standard(&rows, b, &cost)? {
        StandardOutcome::Optimal { value, x } => {
            let argmax = (0..n).map(|j| x[j] - x[n + j]).collect::<Vec<_>>();
            LpOutcome::Optimal {
                value,
                argmax: Vector::new(argmax)?,
            }
        }
        StandardOutcome::Unbounded => LpOutcome::Unbounded,
        StandardOutcome::Infeasible { .. } => LpOutcome::Infeasible,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum StandardOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Unbounded,
    Infeasible { residual: f64 },
}

/// Maximizes `⟨c, x⟩` subject to `A x = b`, `x >= 0`.
pub(crate) fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<StandardOutcome> {
    let mut s = Simplex::new(a, b);
    let residual = s.phase_one()?;
    if residual > feasibility_tol(b) {
        return Ok(StandardOutcome::Infeasible { residual });
    }
    s.drive_out_artificials();
    let n = s.n;
    let mut cost = c.to_vec();
    cost.resize(s.width() - 1, 0.0);
    if !s.optimize(&cost, |j| j < n)? {
        return Ok(StandardOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &j) in s.basis.iter().enumerate() {
        if j < n {
            x[j] = s.rhs(i).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(StandardOutcome::Optimal { value, x })
}

/// Minimum L1 residual `‖A x − b‖₁` over `x >= 0` (the phase-one optimum).
pub(crate) fn min_residual(a: &[Vec<f64>], b: &[f64]) -> Result<f64> {
    Simplex::new(a, b).phase_one()
}

fn feasibility_tol(b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    1e-9 * (1.0 + scale)
}

struct Simplex {
    // m rows of [structural | artificial | rhs]
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    pivots: usize,
    limit: usize,
}

impl Simplex {
    fn new(a: &[Vec<f64>], b: &[f64]) -> Self {
        let m = a.len();
        let n = a.first().map_or(0, Vec::len);
        let t = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (row, &bi))| {
                let sign = if bi < 0.0 { -1.0 } else { 1.0 };
                let mut r = Vec::with_capacity(n + m + 1);
                r.extend(row.iter().map(|v| sign * v));
                r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
                r.push(sign * bi);
                r
            })
            .collect();
        Simplex {
            t,
            basis: (n..n + m).collect(),
            n,
            pivots: 0,
            limit: 10 * (m + n + m),
        }
    }

    fn width(&self) -> usize {
        self.t.first().map_or(self.n + 1, Vec::len)
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width() - 1]
    }

    /// Returns the minimal sum of artificial variables.
    fn phase_one(&mut self) -> Result<f64> {
        let n = self.n;
        let cost: Vec<f64> = (0..self.width() - 1)
            .map(|j| if j < n { 0.0 } else { -1.0 })
            .collect();
        // Bounded below by zero, so never unbounded.
        self.optimize(&cost, |_| true)?;
        Ok(self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= n)
            .map(|(i, _)| self.rhs(i).max(0.0))
            .sum())
    }

    fn drive_out_artificials(&mut self) {
        let n = self.n;
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| self.t[i][j].abs() > PIVOT_TOL) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        // redundant row
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    /// Runs primal simplex iterations for `cost`. Returns `false` when the
    /// objective is unbounded above.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<bool> {
        let cols = self.width() - 1;
        let mut is_basic = vec![false; cols];
        loop {
            is_basic.iter_mut().for_each(|b| *b = false);
            for &j in &self.basis {
                is_basic[j] = true;
            }
            // Bland: lowest-index improving column.
            let entering = (0..cols).find(|&j| {
                !is_basic[j] && allowed(j) && {
                    let z: f64 = self
                        .t
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &bj)| cost[bj] * row[j])
                        .sum();
                    cost[j] - z > PIVOT_TOL
                }
            });
            let Some(col) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[cols] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if (!tie && ratio < br) || (tie && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, col);
            self.pivots += 1;
            if self.pivots > self.limit {
                return Err(Error::PivotLimit { limit: self.limit });
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        self.t[r].iter_mut().for_each(|v| *v /= p);
        self.t[r][c] = 1.0;
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }
}
