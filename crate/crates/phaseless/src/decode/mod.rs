//! Magnitude-only lp-minimization decoders.
//!
//! `decode_l1` and `decode_lp` approximate
//! `argmin ||z||_p  s.t.  || |Az| - y ||_2 <= eta`
//! with a restarted alternating-direction heuristic; [`oracle_decode_real`]
//! solves tiny real noiseless instances exactly by sign-pattern enumeration.

mod adm;
mod oracle;
mod simplex;

pub use oracle::{oracle_decode_real, ORACLE_MAX_COLS, ORACLE_MAX_ROWS};

use serde::{Deserialize, Serialize};

use crate::ensemble::{MeasurementEnsemble, PhaselessObservation};
use crate::error::{Error, Result};
use crate::field::derive_seed;
use crate::signal::SignalVector;

use adm::{run_adm, AdmMode, AdmOutcome};

/// Tuning knobs for the alternating-direction decoders.
///
/// `feasibility_tol` and `objective_tol` are interpreted relative to `||y||_2`
/// (the solver rescales observations to unit norm internally), which keeps
/// decoder outputs exactly equivariant under positive rescaling of `(y, eta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    /// Objective exponent, in (0, 1].
    pub p: f64,
    /// l2 noise budget, >= 0.
    pub eta: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    pub penalty_rho: f64,
    pub feasibility_tol: f64,
    pub objective_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Initial smoothing for the reweighted lp iterations.
    pub irls_epsilon0: f64,
    /// Geometric decay of the smoothing per outer iteration, in (0, 1).
    pub irls_epsilon_decay: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            p: 1.0,
            eta: 0.0,
            max_outer_iters: 600,
            max_inner_iters: 8,
            penalty_rho: 1.0,
            feasibility_tol: 1e-10,
            objective_tol: 1e-10,
            restarts: 8,
            seed: 0,
            irls_epsilon0: 0.1,
            irls_epsilon_decay: 0.97,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::invalid("eta must be finite and >= 0"));
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 {
            return Err(Error::invalid("iteration limits must be >= 1"));
        }
        if !(self.penalty_rho > 0.0) {
            return Err(Error::invalid("penalty_rho must be positive"));
        }
        if !(self.feasibility_tol > 0.0) || !(self.objective_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        if !(self.irls_epsilon0 > 0.0) {
            return Err(Error::invalid("irls_epsilon0 must be positive"));
        }
        if !(self.irls_epsilon_decay > 0.0 && self.irls_epsilon_decay < 1.0) {
            return Err(Error::invalid("irls_epsilon_decay must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Decoder output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub solution: SignalVector,
    /// `sum_i |z_i|^p` of the solution.
    pub objective: f64,
    /// `|| |Az| - y ||_2` of the solution.
    pub residual: f64,
    pub outer_iters: usize,
    /// True when the splitting residual fell below tolerance at a feasible
    /// iterate; false results are best-effort, never a silent failure.
    pub converged: bool,
    /// Which restart produced the returned solution.
    pub restart_index: usize,
}

/// Which heuristic family [`multi_restart`] should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    L1,
    Lp,
}

fn check_problem(a: &MeasurementEnsemble, y: &PhaselessObservation) -> Result<()> {
    if a.rows() != y.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: matrix has {} rows, observation has {}",
            a.rows(),
            y.len()
        )));
    }
    Ok(())
}

/// Run `cfg.restarts` independent decoder initializations and keep the best
/// feasible result by objective; ties go to the lower restart index. When no
/// restart reaches feasibility the least-infeasible iterate is returned with
/// `converged = false`.
pub fn multi_restart(
    kind: DecoderKind,
    a: &MeasurementEnsemble,
    y: &PhaselessObservation,
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    cfg.validate()?;
    check_problem(a, y)?;
    let mode = match kind {
        DecoderKind::L1 => {
            if cfg.p != 1.0 {
                return Err(Error::invalid("l1 decoding requires p = 1"));
            }
            AdmMode::L1
        }
        DecoderKind::Lp => {
            if !(cfg.p > 0.0 && cfg.p < 1.0) {
                return Err(Error::invalid("lp decoding requires p in (0, 1)"));
            }
            AdmMode::Lp { p: cfg.p }
        }
    };

    let mut best: Option<(usize, AdmOutcome, f64)> = None;
    for i in 0..cfg.restarts {
        let outcome = run_adm(a, y.values(), cfg, mode, derive_seed(cfg.seed, i as u64));
        let obj = outcome.z.iter().map(|z| z.norm().powf(cfg.p)).sum::<f64>();
        let better = match &best {
            None => true,
            Some((_, prev, prev_obj)) => match (outcome.feasible, prev.feasible) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => obj < *prev_obj,
                (false, false) => outcome.residual < prev.residual,
            },
        };
        if better {
            best = Some((i, outcome, obj));
        }
    }
    let (restart_index, outcome, objective) = best.expect("restarts >= 1");

    let solution = SignalVector::new(a.field(), outcome.z)?;
    // Residual reported in original units against the observation as given.
    let az = a.apply(solution.entries());
    let residual = az
        .iter()
        .zip(y.values().iter())
        .map(|(u, v)| (u.norm() - v) * (u.norm() - v))
        .sum::<f64>()
        .sqrt();
    Ok(DecodeResult {
        solution,
        objective,
        residual,
        outer_iters: outcome.outer_iters,
        converged: outcome.converged,
        restart_index,
    })
}

/// Heuristic `argmin ||z||_1  s.t.  || |Az| - y ||_2 <= eta`.
pub fn decode_l1(
    a: &MeasurementEnsemble,
    y: &PhaselessObservation,
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    multi_restart(DecoderKind::L1, a, y, cfg)
}

/// Heuristic `argmin ||z||_p  s.t.  || |Az| - y ||_2 <= eta` for `p < 1`,
/// via iteratively reweighted l1 steps.
pub fn decode_lp(
    a: &MeasurementEnsemble,
    y: &PhaselessObservation,
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    multi_restart(DecoderKind::Lp, a, y, cfg)
}

/// Dispatch on `cfg.p`: `p = 1` runs the l1 decoder, `p < 1` the lp decoder.
pub fn decode(
    a: &MeasurementEnsemble,
    y: &PhaselessObservation,
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    if cfg.p == 1.0 {
        decode_l1(a, y, cfg)
    } else {
        decode_lp(a, y, cfg)
    }
}
