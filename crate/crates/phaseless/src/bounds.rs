//! Explicit instance-optimality constants for the magnitude-only lp decoder
//! under the bi-Lipschitz condition, and checks of decoder output against
//! the resulting error bounds.
//!
//! With `phi(r, p) = 2^(1/p-1) * (2/r)^(1/p-1/2)`, the constants exist when
//! the margin `L - U * phi(r, p)` is positive; the decoder error then obeys
//!
//! ```text
//! dist_p(z, x) <= C1 * sigma_k(x)_p + D1 * k^(1/p-1/2) * eta
//! dist_2(z, x) <= C2 * sigma_k(x)_p / k^(1/p-1/2) + D2 * eta
//! ```
//!
//! on the sparsity set `{ ||x||_0 <= (r+4)k }`.

use serde::{Deserialize, Serialize};

use crate::bilipschitz::{beta0, BiLipschitzEstimate};
use crate::decode::DecodeResult;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::signal::{dist_2, dist_p, sigma_k, SignalVector};

/// `2^(1/p-1) * (2/r)^(1/p-1/2)`.
fn phi(r: f64, p: f64) -> f64 {
    2f64.powf(1.0 / p - 1.0) * (2.0 / r).powf(1.0 / p - 0.5)
}

/// Feasibility margin `L - U * 2^(1/p-1) * (2/r)^(1/p-1/2)` of the radius
/// parameter; the constants below exist iff this is positive.
pub fn r_margin(l: f64, u: f64, r: f64, p: f64) -> f64 {
    l - u * phi(r, p)
}

/// The margin specialized to Gaussian ensembles, with `U/L` at the worst of
/// its analytic band: `1 - (beta0 + 0.01) * 2^(1/p-1) * (2/r)^(1/p-1/2)`.
pub fn gaussian_r_margin(field: Field, r: f64, p: f64) -> f64 {
    1.0 - (beta0(field) + 0.01) * phi(r, p)
}

/// The eight instance-optimality constants for given `(L, U, r, p, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub p: f64,
    pub r: f64,
    pub l: f64,
    pub u: f64,
    pub k: usize,
    pub c_tilde1: f64,
    pub c_tilde2: f64,
    pub d_tilde1: f64,
    pub d_tilde2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Evaluate the constants. Errors when the radius margin is not positive.
pub fn instance_constants(l: f64, u: f64, r: f64, p: f64, k: usize) -> Result<BoundConstants> {
    if !(l > 0.0 && u > 0.0 && r > 0.0) {
        return Err(Error::invalid("L, U, r must all be positive"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1], got {p}")));
    }
    if k == 0 {
        return Err(Error::invalid("sparsity order k must be >= 1"));
    }
    let margin = r_margin(l, u, r, p);
    if margin <= 0.0 {
        return Err(Error::invalid(format!(
            "infeasible radius parameter: requires L - U * 2^(1/p-1) * (2/r)^(1/p-1/2) > 0, \
             got {margin:.6} for (L = {l}, U = {u}, r = {r}, p = {p})"
        )));
    }

    let pow21 = 2f64.powf(1.0 / p - 1.0);
    let r_exp = r.powf(1.0 / p - 0.5);
    let c_tilde2 = u * (pow21 / r_exp + 1.0) / margin;
    let d_tilde2 = 2.0 / margin;
    let outer = (2.0 + r).powf(1.0 - p / 2.0);
    let c_tilde1 = outer * c_tilde2.powf(p);
    let d_tilde1 = outer * d_tilde2.powf(p);

    let c1 = pow21 * (2.0 * c_tilde1 + 2.0).powf(1.0 / p);
    let d1 = pow21 * d_tilde1.powf(1.0 / p);
    let half_r_exp = (r / 2.0).powf(1.0 / p - 0.5);
    let c2 = (1.0 + pow21 / half_r_exp) * c_tilde2 + pow21 / r_exp + 1.0;
    let d2 = (1.0 + pow21 / half_r_exp) * d_tilde2;

    Ok(BoundConstants {
        p,
        r,
        l,
        u,
        k,
        c_tilde1,
        c_tilde2,
        d_tilde1,
        d_tilde2,
        c1,
        c2,
        d1,
        d2,
    })
}

/// Sparsity level the bound's bi-Lipschitz condition must cover: `(r + 4) k`.
pub fn required_sparsity_level(r: f64, k: usize) -> usize {
    ((r + 4.0) * k as f64).floor() as usize
}

/// Warn when a paired estimate was certified on a different sparsity set
/// than the one the constants assume (capped at the ambient dimension).
pub fn sparsity_warning(est: &BiLipschitzEstimate, r: f64, k: usize) -> Option<String> {
    let needed = required_sparsity_level(r, k).min(est.n);
    if est.sparsity_level < needed {
        Some(format!(
            "estimate certified on {}-sparse vectors but the constants assume (r+4)k = {} \
             (capped at n = {})",
            est.sparsity_level, needed, est.n
        ))
    } else {
        None
    }
}

impl BoundConstants {
    /// Constants from an empirical estimate with a safety dilation: the
    /// estimate's normalized extremes are un-normalized by `sqrt(m)` and
    /// widened to `(l_hat / kappa, kappa * u_hat)`. Empirical extremes are
    /// inner approximations, so without dilation the constants would be
    /// smaller than valid ones.
    pub fn from_estimate(
        est: &BiLipschitzEstimate,
        r: f64,
        p: f64,
        k: usize,
        kappa: f64,
    ) -> Result<BoundConstants> {
        if !(kappa >= 1.0) {
            return Err(Error::invalid("dilation factor kappa must be >= 1"));
        }
        let sqrt_m = (est.m as f64).sqrt();
        instance_constants(
            sqrt_m * est.l_hat / kappa,
            sqrt_m * est.u_hat * kappa,
            r,
            p,
            k,
        )
    }
}

/// Which of the two error bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormPair {
    /// `dist_p <= C1 * sigma_k(x)_p + D1 * k^(1/p-1/2) * eta`
    PP,
    /// `dist_2 <= C2 * sigma_k(x)_p / k^(1/p-1/2) + D2 * eta`
    TwoP,
}

/// Outcome of one bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub norm_pair: NormPair,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; 0 when both sides vanish, `None` when only `rhs` does.
    pub ratio: Option<f64>,
    pub satisfied: bool,
}

/// Evaluate one side of the instance-optimality bound for a decode result
/// against the true signal.
pub fn check_instance_bound(
    result: &DecodeResult,
    x_true: &SignalVector,
    constants: &BoundConstants,
    eta: f64,
    norm_pair: NormPair,
) -> Result<BoundCheck> {
    if result.solution.len() != x_true.len() || result.solution.field() != x_true.field() {
        return Err(Error::invalid(
            "solution and reference signal disagree in length or field",
        ));
    }
    if !(eta >= 0.0) {
        return Err(Error::invalid("eta must be >= 0"));
    }
    let p = constants.p;
    let k = constants.k as f64;
    let sigma = sigma_k(x_true, constants.k, p)?;
    let k_exp = k.powf(1.0 / p - 0.5);
    let (lhs, rhs) = match norm_pair {
        NormPair::PP => (
            dist_p(&result.solution, x_true, p)?,
            constants.c1 * sigma + constants.d1 * k_exp * eta,
        ),
        NormPair::TwoP => (
            dist_2(&result.solution, x_true)?,
            constants.c2 * sigma / k_exp + constants.d2 * eta,
        ),
    };
    // Floating-point slack so exact recovery with sigma_k = 0 counts as
    // satisfied rather than failing on 1e-16 residue.
    let slack = 1e-9 * (1.0 + x_true.norm2());
    let satisfied = lhs <= rhs + slack;
    let ratio = if rhs > slack {
        Some(lhs / rhs)
    } else if lhs <= slack {
        Some(0.0)
    } else {
        None
    };
    Ok(BoundCheck {
        norm_pair,
        lhs,
        rhs,
        ratio,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_examples() {
        // L = 1, U = 1.659, r = 2, p = 1 is infeasible.
        assert!((r_margin(1.0, 1.659, 2.0, 1.0) - (-0.659)).abs() < 1e-12);
        // Vanishing U leaves the margin at L.
        assert!((r_margin(1.0, 1e-300, 10.0, 0.5) - 1.0).abs() < 1e-12);
        assert!(instance_constants(1.0, 1.659, 2.0, 1.0, 3).is_err());
    }

    #[test]
    fn gaussian_margin_reference_values() {
        // High-precision references for (r = 10, p = 1).
        assert!((gaussian_r_margin(Field::Complex, 10.0, 1.0) - 0.030_147_900_888).abs() < 1e-9);
        assert!((gaussian_r_margin(Field::Real, 10.0, 1.0) - 0.253_646_688_400).abs() < 1e-9);
        // r -> infinity drives the margin to 1.
        assert!((gaussian_r_margin(Field::Real, 1e12, 0.7) - 1.0).abs() < 1e-4);
        // r = 10 is feasible for every p in (0, 1], both fields.
        for p in [0.1, 0.25, 0.5, 0.75, 1.0] {
            assert!(gaussian_r_margin(Field::Real, 10.0, p) > 0.0);
            assert!(gaussian_r_margin(Field::Complex, 10.0, p) > 0.0);
        }
    }

    #[test]
    fn reference_point_for_p1_constants() {
        // Frozen high-precision evaluation at (L, U, r, p) = (1, 1.669, 10, 1).
        let c = instance_constants(1.0, 1.669, 10.0, 1.0, 4).unwrap();
        assert!((c.c_tilde2 - 8.662_380_644_213_54).abs() < 1e-10);
        assert!((c.d_tilde2 - 7.886_419_498_976_62).abs() < 1e-10);
        assert!((c.c1 - 62.014_733_561_116_29).abs() < 1e-9);
        assert!((c.c2 - 13.852_542_803_718_36).abs() < 1e-10);
        assert!((c.d1 - 27.319_358_524_058_81).abs() < 1e-10);
        assert!((c.d2 - 11.413_333_518_734_94).abs() < 1e-10);
    }

    #[test]
    fn c_constants_depend_only_on_the_ratio() {
        for t in [0.5, 3.0] {
            let base = instance_constants(0.9, 1.7, 12.0, 0.5, 2).unwrap();
            let scaled = instance_constants(0.9 * t, 1.7 * t, 12.0, 0.5, 2).unwrap();
            assert!((scaled.c1 - base.c1).abs() <= 1e-12 * base.c1);
            assert!((scaled.c2 - base.c2).abs() <= 1e-12 * base.c2);
            assert!((scaled.d1 - base.d1 / t).abs() <= 1e-12 * base.d1);
            assert!((scaled.d2 - base.d2 / t).abs() <= 1e-12 * base.d2);
        }
    }

    #[test]
    fn tilde_constants_decrease_in_the_margin() {
        for (r, p) in [(10.0, 1.0), (20.0, 0.5), (50.0, 0.25)] {
            let mut prev: Option<(f64, f64)> = None;
            // Growing L with fixed (U, r, p) grows the margin strictly.
            for i in 0..20 {
                let l = 1.0 + 0.1 * i as f64;
                let c = instance_constants(l, 1.0 / phi(r, p) * 0.99, r, p, 2);
                let c = match c {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                if let Some((pc, pd)) = prev {
                    assert!(c.c_tilde2 < pc);
                    assert!(c.d_tilde2 < pd);
                }
                prev = Some((c.c_tilde2, c.d_tilde2));
            }
            assert!(prev.is_some());
        }
    }

    #[test]
    fn all_constants_positive_when_feasible() {
        let mut count = 0;
        for i in 0..200 {
            let l = 0.5 + 0.01 * i as f64;
            let u = l * (1.0 + (i % 7) as f64 * 0.3);
            let p = 0.25 + 0.015 * (i % 50) as f64;
            let r = 8.0 * (u / l).powf(2.0 * p / (2.0 - p)) + 1.0 + i as f64 % 9.0;
            if r_margin(l, u, r, p) <= 0.0 {
                continue;
            }
            let c = instance_constants(l, u, r, p, 1 + i % 5).unwrap();
            for v in [
                c.c_tilde1, c.c_tilde2, c.d_tilde1, c.d_tilde2, c.c1, c.c2, c.d1, c.d2,
            ] {
                assert!(v > 0.0 && v.is_finite());
            }
            count += 1;
        }
        assert!(count > 50);
    }

    #[test]
    fn sparsity_requirement_and_warning() {
        assert_eq!(required_sparsity_level(10.0, 3), 42);
        let est = BiLipschitzEstimate {
            l_hat: 0.5,
            u_hat: 1.0,
            n_pairs: 10,
            skipped_degenerate: 0,
            probe_breakdown: Default::default(),
            sparsity_level: 4,
            seed: 0,
            m: 50,
            n: 6,
        };
        // Needed level caps at n = 6; 4 < 6 warns.
        assert!(sparsity_warning(&est, 10.0, 3).is_some());
        let mut ok = est.clone();
        ok.sparsity_level = 6;
        assert!(sparsity_warning(&ok, 10.0, 3).is_none());
    }

    #[test]
    fn bound_check_vanishing_both_sides() {
        use crate::decode::DecodeResult;
        let x = SignalVector::real(vec![2.0, 0.0, 0.0]).unwrap();
        let result = DecodeResult {
            solution: x.clone(),
            objective: 2.0,
            residual: 0.0,
            outer_iters: 1,
            converged: true,
            restart_index: 0,
        };
        let c = instance_constants(1.0, 1.66, 10.0, 1.0, 1).unwrap();
        let chk = check_instance_bound(&result, &x, &c, 0.0, NormPair::PP).unwrap();
        assert!(chk.satisfied);
        assert_eq!(chk.ratio, Some(0.0));
        assert_eq!(chk.rhs, 0.0);
    }

    #[test]
    fn rhs_grows_linearly_in_eta() {
        let x = SignalVector::real(vec![1.0, 0.2, 0.1, 0.05]).unwrap();
        let sol = SignalVector::real(vec![1.0, 0.2, 0.0, 0.0]).unwrap();
        let result = DecodeResult {
            solution: sol,
            objective: 1.2,
            residual: 0.0,
            outer_iters: 1,
            converged: true,
            restart_index: 0,
        };
        let c = instance_constants(1.0, 1.66, 10.0, 1.0, 2).unwrap();
        let r0 = check_instance_bound(&result, &x, &c, 0.0, NormPair::PP).unwrap();
        let r1 = check_instance_bound(&result, &x, &c, 0.1, NormPair::PP).unwrap();
        let r2 = check_instance_bound(&result, &x, &c, 0.2, NormPair::PP).unwrap();
        let slope1 = (r1.rhs - r0.rhs) / 0.1;
        let slope2 = (r2.rhs - r1.rhs) / 0.1;
        let expect = c.d1 * (2f64).powf(1.0 / 1.0 - 0.5);
        assert!((slope1 - expect).abs() < 1e-9);
        assert!((slope2 - expect).abs() < 1e-9);

        let t0 = check_instance_bound(&result, &x, &c, 0.0, NormPair::TwoP).unwrap();
        let t1 = check_instance_bound(&result, &x, &c, 0.1, NormPair::TwoP).unwrap();
        assert!(((t1.rhs - t0.rhs) / 0.1 - c.d2).abs() < 1e-9);
    }
}
