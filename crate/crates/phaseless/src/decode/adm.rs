//! Alternating-direction core shared by the l1 and reweighted-lp decoders.
//!
//! The program `min ||z||_p  s.t.  || |Az| - y ||_2 <= eta` is split with an
//! auxiliary variable `w ~ Az`. Each outer iteration:
//!
//! 1. projects `Az + u` onto `{w : || |w| - y ||_2 <= eta}` keeping the phase
//!    of every coordinate (for `eta = 0` this is `w_i = y_i * phase(...)`),
//! 2. updates `z` by proximal-gradient steps on
//!    `||Az - (w - u)||_2^2 + (1/rho) * sum_i weight_i |z_i|`,
//! 3. performs dual ascent `u += Az - w`.
//!
//! For the lp variant the weights are recomputed every outer iteration from
//! the current iterate, `weight_i = (|z_i| + eps_t)^(p-1)`, with `eps_t`
//! decaying geometrically.
//!
//! All internal tolerances apply to `y` rescaled to unit norm, which makes
//! the decoder exactly equivariant under positive rescaling of `(y, eta)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::MeasurementEnsemble;
use crate::field::phase;
use crate::signal::gaussian_scalar;

use super::DecoderConfig;

pub(crate) struct AdmOutcome {
    /// Best iterate in the original (unscaled) units.
    pub z: Vec<Complex64>,
    /// Whether any iterate satisfied the feasibility contract.
    pub feasible: bool,
    /// `|| |Az| - y ||_2` of the returned iterate, unscaled units.
    pub residual: f64,
    pub outer_iters: usize,
    pub converged: bool,
    /// Accepted objective trace in scaled units (monotone nonincreasing).
    #[allow(dead_code)]
    pub accepted_objectives: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum AdmMode {
    L1,
    /// Iteratively reweighted l1 targeting `sum |z_i|^p`.
    Lp { p: f64 },
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn l2c(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn objective(z: &[Complex64], mode: AdmMode) -> f64 {
    match mode {
        AdmMode::L1 => z.iter().map(|x| x.norm()).sum(),
        AdmMode::Lp { p } => z.iter().map(|x| x.norm().powf(p)).sum(),
    }
}

/// Projection of `v` onto `{w : || |w| - y ||_2 <= eta}`.
///
/// Coordinate phases of `v` are kept (exact); the radial part is projected
/// onto `{r >= 0} ∩ ball(y, eta)` by alternating ball-shrink and clamp steps.
/// For `eta = 0` the projection is exact: `w_i = y_i * phase(v_i)`.
fn project_magnitudes(v: &[Complex64], y: &[f64], eta: f64) -> Vec<Complex64> {
    if eta == 0.0 {
        return v
            .iter()
            .zip(y.iter())
            .map(|(&vi, &yi)| phase(vi) * yi)
            .collect();
    }
    let mut r: Vec<f64> = v.iter().map(|x| x.norm()).collect();
    for _ in 0..32 {
        let mut dist_sq = 0.0;
        for (ri, yi) in r.iter().zip(y.iter()) {
            dist_sq += (ri - yi) * (ri - yi);
        }
        let dist = dist_sq.sqrt();
        if dist <= eta * (1.0 + 1e-12) {
            break;
        }
        let scale = eta / dist;
        let mut clamped = false;
        for (ri, yi) in r.iter_mut().zip(y.iter()) {
            *ri = yi + (*ri - yi) * scale;
            if *ri < 0.0 {
                *ri = 0.0;
                clamped = true;
            }
        }
        if !clamped {
            break;
        }
    }
    v.iter()
        .zip(r.iter())
        .map(|(&vi, &ri)| phase(vi) * ri)
        .collect()
}

/// Proximal-gradient (FISTA) steps on
/// `||Az - target||_2^2 + (1/rho) * sum_i weight_i |z_i|`, warm-started at `z`.
#[allow(clippy::too_many_arguments)]
fn prox_gradient_steps(
    a: &MeasurementEnsemble,
    z: &mut Vec<Complex64>,
    az: &mut Vec<Complex64>,
    target: &[Complex64],
    weights: &[f64],
    rho: f64,
    step: f64,
    iters: usize,
) {
    let n = z.len();
    let mut momentum = z.clone();
    let mut t_prev = 1.0f64;
    let mut az_momentum = az.clone();
    for _ in 0..iters {
        // Gradient of ||A m - target||^2 at the momentum point.
        let mut r: Vec<Complex64> = az_momentum
            .iter()
            .zip(target.iter())
            .map(|(u, v)| u - v)
            .collect();
        for x in r.iter_mut() {
            *x *= 2.0;
        }
        let grad = a.apply_adjoint(&r);
        let mut z_new = Vec::with_capacity(n);
        for i in 0..n {
            let cand = momentum[i] - grad[i] * step;
            let mag = cand.norm();
            let thr = step * weights[i] / rho;
            if mag <= thr {
                z_new.push(Complex64::new(0.0, 0.0));
            } else {
                z_new.push(cand * ((mag - thr) / mag));
            }
        }
        let t_new = (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt()) / 2.0;
        let beta = (t_prev - 1.0) / t_new;
        let mut next_momentum = Vec::with_capacity(n);
        for i in 0..n {
            next_momentum.push(z_new[i] + (z_new[i] - z[i]) * beta);
        }
        *z = z_new;
        momentum = next_momentum;
        az_momentum = a.apply(&momentum);
        t_prev = t_new;
    }
    *az = a.apply(z);
}

/// One alternating-direction run from a single random start.
pub(crate) fn run_adm(
    a: &MeasurementEnsemble,
    y: &[f64],
    cfg: &DecoderConfig,
    mode: AdmMode,
    seed: u64,
) -> AdmOutcome {
    let (m, n) = (a.rows(), a.cols());
    debug_assert_eq!(y.len(), m);

    let ynorm = l2(y);
    if ynorm <= cfg.eta {
        // Zero is feasible and norm-minimal.
        return AdmOutcome {
            z: vec![Complex64::new(0.0, 0.0); n],
            feasible: true,
            residual: ynorm,
            outer_iters: 0,
            converged: true,
            accepted_objectives: vec![0.0],
        };
    }

    let ys: Vec<f64> = y.iter().map(|v| v / ynorm).collect();
    let eta_s = cfg.eta / ynorm;

    let sigma = a.op_norm_estimate().max(1e-300);
    let step = 1.0 / (2.0 * sigma * sigma * 1.02);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let mut z: Vec<Complex64> = (0..n)
        .map(|_| gaussian_scalar(a.field(), &mut rng) * scale)
        .collect();
    let mut az = a.apply(&z);
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    let mut weights = vec![1.0f64; n];

    let mut best_z: Option<Vec<Complex64>> = None;
    let mut best_obj = f64::INFINITY;
    let mut best_res = f64::INFINITY;
    let mut fallback_z = z.clone();
    let mut fallback_res = f64::INFINITY;
    let mut accepted = Vec::new();
    let mut converged = false;
    let mut outer_done = 0;

    let mut eps = cfg.irls_epsilon0;
    for outer in 0..cfg.max_outer_iters {
        outer_done = outer + 1;
        if let AdmMode::Lp { p } = mode {
            for (wi, zi) in weights.iter_mut().zip(z.iter()) {
                *wi = (zi.norm() + eps).powf(p - 1.0);
            }
            eps *= cfg.irls_epsilon_decay;
        }

        let v: Vec<Complex64> = az.iter().zip(u.iter()).map(|(a, b)| a + b).collect();
        let w = project_magnitudes(&v, &ys, eta_s);
        let target: Vec<Complex64> = w.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
        prox_gradient_steps(
            a,
            &mut z,
            &mut az,
            &target,
            &weights,
            cfg.penalty_rho,
            step,
            cfg.max_inner_iters,
        );

        let split: Vec<Complex64> = az.iter().zip(w.iter()).map(|(a, b)| a - b).collect();
        let split_res = l2c(&split);
        for (ui, si) in u.iter_mut().zip(split.iter()) {
            *ui += si;
        }

        let mut res_sq = 0.0;
        for (azi, yi) in az.iter().zip(ys.iter()) {
            let d = azi.norm() - yi;
            res_sq += d * d;
        }
        let res = res_sq.sqrt();

        if res < fallback_res {
            fallback_res = res;
            fallback_z = z.clone();
        }
        if res <= eta_s + cfg.feasibility_tol {
            let obj = objective(&z, mode);
            if obj < best_obj {
                best_obj = obj;
                best_res = res;
                best_z = Some(z.clone());
                accepted.push(obj);
            }
        }
        if split_res <= cfg.feasibility_tol && res <= eta_s + cfg.feasibility_tol {
            converged = true;
            break;
        }
    }

    let (mut out_z, feasible, res_scaled) = match best_z {
        Some(bz) => (bz, true, best_res),
        None => (fallback_z, false, fallback_res),
    };
    for x in out_z.iter_mut() {
        *x *= ynorm;
    }
    AdmOutcome {
        z: out_z,
        feasible,
        residual: res_scaled * ynorm,
        outer_iters: outer_done,
        converged: converged && feasible,
        accepted_objectives: accepted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::gaussian_matrix;
    use crate::field::Field;

    #[test]
    fn projection_keeps_phases_and_hits_magnitudes_when_noiseless() {
        let v = vec![Complex64::new(3.0, 4.0), Complex64::new(-2.0, 0.0)];
        let y = vec![10.0, 1.0];
        let w = project_magnitudes(&v, &y, 0.0);
        assert!((w[0] - Complex64::new(6.0, 8.0)).norm() < 1e-12);
        assert!((w[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_respects_noise_ball() {
        let v = vec![Complex64::new(5.0, 0.0), Complex64::new(0.0, 3.0)];
        let y = vec![1.0, 1.0];
        let eta = 0.5;
        let w = project_magnitudes(&v, &y, eta);
        let mut d = 0.0;
        for (wi, yi) in w.iter().zip(y.iter()) {
            d += (wi.norm() - yi) * (wi.norm() - yi);
        }
        assert!(d.sqrt() <= eta * (1.0 + 1e-9));
    }

    #[test]
    fn accepted_objectives_never_increase() {
        let a = gaussian_matrix(Field::Real, 12, 6, 3).unwrap();
        let x: Vec<Complex64> = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let y: Vec<f64> = a.apply(&x).iter().map(|z| z.norm()).collect();
        let cfg = DecoderConfig {
            p: 0.5,
            ..DecoderConfig::default()
        };
        let out = run_adm(&a, &y, &cfg, AdmMode::Lp { p: 0.5 }, 17);
        for pair in out.accepted_objectives.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
    }
}
