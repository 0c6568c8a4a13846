//! Exact decoding oracle for tiny real noiseless instances.
//!
//! Enumerates the `2^(m-1)` measurement sign patterns (up to a global sign);
//! each pattern reduces `min ||z||_p  s.t.  |Az| = y` to equality-constrained
//! minimization. For `p = 1` every pattern is a linear program. For `p < 1`
//! the objective is concave in each orthant, so over the affine solution set
//! of a pattern the minimum sits where `dim(null(A))` coordinates vanish;
//! those points are enumerated exhaustively (solution sets of dimension at
//! most 2 are supported).

use num_complex::Complex64;

use crate::ensemble::{MeasurementEnsemble, PhaselessObservation};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::signal::SignalVector;

use super::simplex::min_l1_equality;
use super::DecodeResult;

/// Residual tolerance on equality constraints.
const FEAS_TOL: f64 = 1e-9;

pub const ORACLE_MAX_ROWS: usize = 14;
pub const ORACLE_MAX_COLS: usize = 10;

/// Reduced row echelon form of `[A | b]`. Returns a particular solution with
/// free variables at zero plus a null-space basis, or `None` if inconsistent.
fn solve_affine(
    m: usize,
    n: usize,
    a: &[f64],
    b: &[f64],
    tol: f64,
) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let cols = n + 1;
    let mut mat: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = a[i * n..(i + 1) * n].to_vec();
            row.push(b[i]);
            row
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let piv = (row..m).max_by(|&x, &y| {
            mat[x][col]
                .abs()
                .partial_cmp(&mat[y][col].abs())
                .unwrap()
        });
        let piv = match piv {
            Some(r) if mat[r][col].abs() > tol => r,
            _ => continue,
        };
        mat.swap(row, piv);
        let p = mat[row][col];
        for v in mat[row].iter_mut() {
            *v /= p;
        }
        for r in 0..m {
            if r != row && mat[r][col] != 0.0 {
                let f = mat[r][col];
                for k in 0..cols {
                    let upd = f * mat[row][k];
                    mat[r][k] -= upd;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    // Rows with zero coefficients must have zero rhs.
    for r in row..m {
        if mat[r][n].abs() > tol {
            return None;
        }
    }

    let mut z0 = vec![0.0; n];
    for (r, &c) in pivot_cols.iter().enumerate() {
        z0[c] = mat[r][n];
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut v = vec![0.0; n];
        v[f] = 1.0;
        for (r, &c) in pivot_cols.iter().enumerate() {
            v[c] = -mat[r][f];
        }
        basis.push(v);
    }
    Some((z0, basis))
}

fn rank_of(m: usize, n: usize, a: &[f64], tol: f64) -> usize {
    let zero = vec![0.0; m];
    let (_, basis) = solve_affine(m, n, a, &zero, tol).expect("homogeneous system is consistent");
    n - basis.len()
}

fn lp_norm_pow(z: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        z.iter().map(|v| v.abs()).sum()
    } else {
        z.iter().map(|v| v.abs().powf(p)).sum()
    }
}

fn max_residual(m: usize, n: usize, a: &[f64], z: &[f64], b: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m {
        let mut acc = 0.0;
        for j in 0..n {
            acc += a[i * n + j] * z[j];
        }
        worst = worst.max((acc - b[i]).abs());
    }
    worst
}

/// Candidate minimizers of `sum |z0 + V t|^p` over the affine solution set:
/// every point where `dim` coordinates vanish, plus `z0` itself.
fn lp_candidates_on_affine(z0: &[f64], basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let d = basis.len();
    let mut out = vec![z0.to_vec()];
    match d {
        0 => {}
        1 => {
            let v = &basis[0];
            for i in 0..n {
                if v[i].abs() > 1e-12 {
                    let t = -z0[i] / v[i];
                    out.push((0..n).map(|j| z0[j] + t * v[j]).collect());
                }
            }
        }
        2 => {
            let (v1, v2) = (&basis[0], &basis[1]);
            for i in 0..n {
                for j in (i + 1)..n {
                    let det = v1[i] * v2[j] - v1[j] * v2[i];
                    if det.abs() > 1e-12 {
                        let t1 = (-z0[i] * v2[j] + z0[j] * v2[i]) / det;
                        let t2 = (-v1[i] * z0[j] + v1[j] * z0[i]) / det;
                        out.push((0..n).map(|k| z0[k] + t1 * v1[k] + t2 * v2[k]).collect());
                    }
                }
            }
        }
        _ => unreachable!("solution-set dimension checked by the caller"),
    }
    out
}

/// Exact global minimizer of `min ||z||_p  s.t.  |Az| = y` for real
/// instances with `m <= 14`, `n <= 10`, and zero noise budget.
pub fn oracle_decode_real(
    a: &MeasurementEnsemble,
    y: &PhaselessObservation,
    p: f64,
    eta: f64,
) -> Result<DecodeResult> {
    if a.field() != Field::Real {
        return Err(Error::invalid(
            "exact oracle supports the real field only (continuous phases cannot be enumerated)",
        ));
    }
    let (m, n) = (a.rows(), a.cols());
    if m > ORACLE_MAX_ROWS || n > ORACLE_MAX_COLS {
        return Err(Error::invalid(format!(
            "oracle size limits exceeded: {m} x {n} (max {ORACLE_MAX_ROWS} x {ORACLE_MAX_COLS})"
        )));
    }
    if eta != 0.0 {
        return Err(Error::invalid(
            "oracle handles equality constraints only (eta must be 0)",
        ));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1], got {p}")));
    }
    if y.len() != m {
        return Err(Error::invalid(format!(
            "observation length {} does not match m = {m}",
            y.len()
        )));
    }
    if y.values().iter().any(|&v| v < 0.0) {
        return Err(Error::invalid(
            "negative observation entries cannot equal magnitudes exactly",
        ));
    }

    let areal: Vec<f64> = a.entries().iter().map(|z| z.re).collect();
    let yv = y.values();

    let finish = |z: Vec<f64>, patterns: usize| -> Result<DecodeResult> {
        let zc: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let solution = SignalVector::new(Field::Real, zc)?;
        let az = a.apply(solution.entries());
        let residual = az
            .iter()
            .zip(yv.iter())
            .map(|(u, v)| (u.norm() - v) * (u.norm() - v))
            .sum::<f64>()
            .sqrt();
        let objective = solution.norm_p_pow(p);
        Ok(DecodeResult {
            solution,
            objective,
            residual,
            outer_iters: patterns,
            converged: true,
            restart_index: 0,
        })
    };

    if yv.iter().all(|&v| v == 0.0) {
        return finish(vec![0.0; n], 0);
    }

    if p < 1.0 {
        let d = n - rank_of(m, n, &areal, FEAS_TOL);
        if d > 2 {
            return Err(Error::invalid(format!(
                "solution sets of dimension {d} > 2 are not searchable exactly for p < 1"
            )));
        }
    }

    // Sign patterns act on the strictly positive observations; the first of
    // them is pinned to +1 because the global sign is a program symmetry.
    let free_rows: Vec<usize> = (0..m).filter(|&i| yv[i] > 0.0).collect();
    let n_free = free_rows.len().saturating_sub(1);
    let n_patterns = 1usize << n_free;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let consider = |z: Vec<f64>, obj: f64, best: &mut Option<(f64, Vec<f64>)>| {
        if best.as_ref().is_none_or(|(bo, _)| obj < *bo) {
            *best = Some((obj, z));
        }
    };

    for pattern in 0..n_patterns {
        let mut b: Vec<f64> = yv.to_vec();
        for (bit, &row) in free_rows.iter().skip(1).enumerate() {
            if (pattern >> bit) & 1 == 1 {
                b[row] = -b[row];
            }
        }
        if p == 1.0 {
            if let Some((z, obj)) = min_l1_equality(m, n, &areal, &b, FEAS_TOL)? {
                if max_residual(m, n, &areal, &z, &b) <= 1e-6 * (1.0 + yv.iter().cloned().fold(0.0, f64::max)) {
                    consider(z, obj, &mut best);
                }
            }
        } else if let Some((z0, basis)) = solve_affine(m, n, &areal, &b, FEAS_TOL) {
            let mut candidates = lp_candidates_on_affine(&z0, &basis, n);
            // The l1 vertex is kept as an extra candidate.
            if let Some((z, _)) = min_l1_equality(m, n, &areal, &b, FEAS_TOL)? {
                candidates.push(z);
            }
            for z in candidates {
                if max_residual(m, n, &areal, &z, &b)
                    <= 1e-6 * (1.0 + yv.iter().cloned().fold(0.0, f64::max))
                {
                    let obj = lp_norm_pow(&z, p);
                    consider(z, obj, &mut best);
                }
            }
        }
    }

    match best {
        Some((_, z)) => finish(z, n_patterns),
        None => Err(Error::invalid(
            "no sign pattern admits an exact solution; the observation is not realizable",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::gaussian_matrix;

    fn small_matrix() -> MeasurementEnsemble {
        MeasurementEnsemble::from_entries(
            Field::Real,
            3,
            2,
            [1.0, 0.0, 0.0, 1.0, 1.0, 1.0]
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn tiny_l1_instance() {
        let a = small_matrix();
        let y = PhaselessObservation::exact(vec![1.0, 0.0, 1.0]).unwrap();
        let r = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();
        assert!((r.objective - 1.0).abs() < 1e-9);
        assert!((r.solution.entries()[0].re.abs() - 1.0).abs() < 1e-9);
        assert!(r.solution.entries()[1].norm() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn same_minimizer_set_for_p_half() {
        let a = small_matrix();
        let y = PhaselessObservation::exact(vec![1.0, 0.0, 1.0]).unwrap();
        let r = oracle_decode_real(&a, &y, 0.5, 0.0).unwrap();
        assert!((r.solution.entries()[0].re.abs() - 1.0).abs() < 1e-9);
        assert!(r.solution.entries()[1].norm() < 1e-9);
        assert!((r.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_observation_returns_zero() {
        let a = gaussian_matrix(Field::Real, 5, 3, 8).unwrap();
        let y = PhaselessObservation::exact(vec![0.0; 5]).unwrap();
        let r = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();
        assert_eq!(r.objective, 0.0);
        assert!(r.solution.entries().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn scalar_instance() {
        let a = MeasurementEnsemble::from_entries(
            Field::Real,
            1,
            1,
            vec![Complex64::new(2.0, 0.0)],
        )
        .unwrap();
        let y = PhaselessObservation::exact(vec![4.0]).unwrap();
        let r = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();
        assert!((r.solution.entries()[0].re.abs() - 2.0).abs() < 1e-9);
        assert!((r.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_contract_inputs() {
        let a = gaussian_matrix(Field::Real, 3, 2, 0).unwrap();
        let y = PhaselessObservation::exact(vec![1.0; 3]).unwrap();
        assert!(oracle_decode_real(&a, &y, 1.0, 0.5).is_err());
        assert!(oracle_decode_real(&a, &y, 1.5, 0.0).is_err());

        let big = gaussian_matrix(Field::Real, 15, 2, 0).unwrap();
        let yb = PhaselessObservation::exact(vec![1.0; 15]).unwrap();
        assert!(oracle_decode_real(&big, &yb, 1.0, 0.0).is_err());

        let c = gaussian_matrix(Field::Complex, 3, 2, 0).unwrap();
        assert!(oracle_decode_real(&c, &y, 1.0, 0.0).is_err());
    }

    #[test]
    fn global_sign_flip_gives_identical_objective() {
        // |A(-x)| == |Ax| bit for bit in the real field.
        let a = gaussian_matrix(Field::Real, 6, 4, 21).unwrap();
        let x = crate::signal::sample_signal(
            crate::signal::SignalKind::ExactlySparse,
            4,
            2,
            Field::Real,
            3,
        )
        .unwrap();
        let y1 = crate::ensemble::phaseless_measure(&a, &x, None).unwrap();
        let neg_x = x.rotated(Complex64::new(-1.0, 0.0)).unwrap();
        let y2 = crate::ensemble::phaseless_measure(&a, &neg_x, None).unwrap();
        assert_eq!(y1.values(), y2.values());
        let r1 = oracle_decode_real(&a, &y1, 1.0, 0.0).unwrap();
        let r2 = oracle_decode_real(&a, &y2, 1.0, 0.0).unwrap();
        assert_eq!(r1.objective, r2.objective);
    }

    #[test]
    fn affine_solver_finds_null_space() {
        // x + y + z = 1 has a 2-dimensional solution set.
        let a = [1.0, 1.0, 1.0];
        let (z0, basis) = solve_affine(1, 3, &a, &[1.0], 1e-12).unwrap();
        assert_eq!(basis.len(), 2);
        assert!((z0.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for v in &basis {
            assert!(v.iter().sum::<f64>().abs() < 1e-12);
        }
        // Inconsistent system.
        let a2 = [1.0, 1.0, 2.0, 2.0];
        assert!(solve_affine(2, 2, &a2, &[1.0, 3.0], 1e-9).is_none());
    }
}
