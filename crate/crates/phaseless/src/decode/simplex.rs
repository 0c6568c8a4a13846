//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the exact decoding oracle: tens of variables, at most fourteen
//! equality constraints. No sparsity, no revised factorizations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpResult {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
}

const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    /// rows x (n_total + 1); last column is the rhs.
    rows: Vec<Vec<f64>>,
    /// Basic variable per row.
    basis: Vec<usize>,
    n_total: usize,
    tol: f64,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_total]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= piv;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for j in 0..=self.n_total {
                    let upd = self.rows[row][j] * factor;
                    self.rows[i][j] -= upd;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j - c_B^T B^{-1} A_j` for the current basis.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.rows.len();
        let mut red = vec![0.0; self.n_total];
        for (j, r) in red.iter_mut().enumerate() {
            let mut acc = costs[j];
            for i in 0..m {
                acc -= costs[self.basis[i]] * self.rows[i][j];
            }
            *r = acc;
        }
        red
    }

    /// Minimize `costs . v` with Bland's rule; `allowed` masks columns that
    /// may enter the basis. Returns false if the problem is unbounded.
    fn run(&mut self, costs: &[f64], allowed: &[bool]) -> Result<bool> {
        let m = self.rows.len();
        for _ in 0..MAX_PIVOTS {
            let red = self.reduced_costs(costs);
            // Bland: entering variable is the lowest eligible index.
            let mut enter = None;
            for j in 0..self.n_total {
                if allowed[j] && red[j] < -self.tol {
                    enter = Some(j);
                    break;
                }
            }
            let enter = match enter {
                Some(j) => j,
                None => return Ok(true),
            };
            // Ratio test; ties resolved by the lowest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let coef = self.rows[i][enter];
                if coef > self.tol {
                    let ratio = self.rhs(i) / coef;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - self.tol
                                || ((ratio - br).abs() <= self.tol
                                    && self.basis[i] < self.basis[bi])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return Ok(false),
            }
        }
        Err(Error::invalid(
            "simplex exceeded the pivot budget; possible numerical cycling",
        ))
    }
}

/// Solve `min c.v  s.t.  M v = b, v >= 0` for a dense row-major `M`.
pub(crate) fn simplex_solve(
    m: usize,
    n: usize,
    mat: &[f64],
    b: &[f64],
    c: &[f64],
    tol: f64,
) -> Result<LpResult> {
    debug_assert_eq!(mat.len(), m * n);
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);

    let n_total = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_total + 1];
        for j in 0..n {
            row[j] = flip * mat[i * n + j];
        }
        row[n + i] = 1.0;
        row[n_total] = flip * b[i];
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n_total).collect(),
        n_total,
        tol,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_costs = vec![0.0; n_total];
    for cj in phase1_costs.iter_mut().skip(n) {
        *cj = 1.0;
    }
    let allowed_all = vec![true; n_total];
    if !t.run(&phase1_costs, &allowed_all)? {
        return Err(Error::invalid("phase-1 simplex reported unbounded"));
    }
    let phase1_obj: f64 = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .map(|i| t.rhs(i))
        .sum();
    if phase1_obj > tol.max(1e-7) {
        return Ok(LpResult::Infeasible);
    }

    // Drive remaining artificials out of the basis; fully zero rows are
    // redundant constraints and are dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            let col = (0..n).find(|&j| t.rows[i][j].abs() > tol);
            match col {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2: original costs; artificial columns may not re-enter.
    let mut phase2_costs = vec![0.0; n_total];
    phase2_costs[..n].copy_from_slice(c);
    let mut allowed = vec![false; n_total];
    for a in allowed.iter_mut().take(n) {
        *a = true;
    }
    if !t.run(&phase2_costs, &allowed)? {
        return Err(Error::invalid("lp is unbounded"));
    }

    let mut x = vec![0.0; n];
    for (row, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] = t.rhs(row);
        }
    }
    let objective = x.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
    Ok(LpResult::Optimal { x, objective })
}

/// `min ||z||_1  s.t.  A z = b` via the `z = z+ - z-` split.
pub(crate) fn min_l1_equality(
    m: usize,
    n: usize,
    a: &[f64],
    b: &[f64],
    tol: f64,
) -> Result<Option<(Vec<f64>, f64)>> {
    let cols = 2 * n;
    let mut mat = vec![0.0; m * cols];
    for i in 0..m {
        for j in 0..n {
            mat[i * cols + j] = a[i * n + j];
            mat[i * cols + n + j] = -a[i * n + j];
        }
    }
    let c = vec![1.0; cols];
    match simplex_solve(m, cols, &mat, b, &c, tol)? {
        LpResult::Infeasible => Ok(None),
        LpResult::Optimal { x, objective } => {
            let z: Vec<f64> = (0..n).map(|j| x[j] - x[n + j]).collect();
            Ok(Some((z, objective)))
        }
    }
}
