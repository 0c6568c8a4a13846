//! Seeded experiment campaigns and their persisted reports.
//!
//! Every campaign is a pure function of its config: trials derive per-index
//! sub-seeds from the master seed, so reruns are bit-identical and trials may
//! execute in parallel without affecting any output.

mod campaign;
mod report;

pub use campaign::{
    run_nonuniform_campaign, run_noise_sweep, run_nullspace_probe, run_uniform_campaign,
};
pub use report::{load_report, persist_report};

use serde::{Deserialize, Serialize};

use crate::decode::DecoderConfig;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::signal::{SignalKind, SignalVector};

/// Bumped whenever the persisted report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

fn default_gamma() -> f64 {
    5.0
}

fn default_p() -> f64 {
    1.0
}

fn default_success_rtol() -> f64 {
    1e-4
}

/// How per-trial bound constants are obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundMode {
    /// User-supplied bi-Lipschitz constants, validated once up front.
    Strict { l: f64, u: f64, r: f64 },
    /// Per-trial empirical estimate, dilated to `(l_hat/kappa, kappa*u_hat)`
    /// because sampled extremes are inner approximations.
    Empirical {
        r: f64,
        kappa: f64,
        pairs: usize,
        refine: usize,
    },
}

impl Default for BoundMode {
    fn default() -> Self {
        BoundMode::Empirical {
            r: 10.0,
            kappa: 2.0,
            pairs: 200,
            refine: 10,
        }
    }
}

/// Configuration of a uniform recovery campaign: fresh matrix and signal per
/// trial, decode, and evaluate both instance-optimality bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    /// Explicit measurement count; when absent, `ceil(gamma * k * ln(e n/k))`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Absolute l2 noise budget; noise vectors are drawn uniformly on the
    /// eta-sphere.
    #[serde(default)]
    pub eta: f64,
    pub signal: SignalKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub bounds: BoundMode,
    /// A trial counts as a success when `dist_2 <= success_rtol * ||x||_2`.
    #[serde(default = "default_success_rtol")]
    pub success_rtol: f64,
}

impl ExperimentConfig {
    pub fn resolved_m(&self) -> Result<usize> {
        match self.m {
            Some(m) if m >= 1 => Ok(m),
            Some(m) => Err(Error::invalid(format!("m must be >= 1, got {m}"))),
            None => {
                let n = self.n as f64;
                let k = self.k as f64;
                let m = (self.gamma * k * (std::f64::consts::E * n / k).ln()).ceil();
                if !(m.is_finite() && m >= 1.0) {
                    return Err(Error::invalid("measurement rule produced an invalid m"));
                }
                Ok(m as usize)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::invalid(format!(
                "k = {} must satisfy 1 <= k <= n = {}",
                self.k, self.n
            )));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid("p must lie in (0, 1]"));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::invalid("eta must be >= 0"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::invalid("gamma must be positive"));
        }
        if !(self.success_rtol > 0.0) {
            return Err(Error::invalid("success_rtol must be positive"));
        }
        self.resolved_m()?;
        let mut dec = self.decoder.clone();
        dec.p = self.p;
        dec.eta = self.eta;
        dec.validate()?;
        if let BoundMode::Strict { l, u, r } = self.bounds {
            crate::bounds::instance_constants(l, u, r, self.p, self.k)?;
        }
        if let BoundMode::Empirical { kappa, pairs, r, .. } = self.bounds {
            if !(kappa >= 1.0) || pairs == 0 || !(r > 0.0) {
                return Err(Error::invalid(
                    "empirical bound mode needs kappa >= 1, pairs >= 1, r > 0",
                ));
            }
        }
        Ok(())
    }
}

/// One uniform-campaign trial. Distances are recomputable from the seeds
/// echoed in the report config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub sigma_k_p: f64,
    pub sigma_k_2: f64,
    pub x_norm2: f64,
    /// `dist_p(decoded, x)`.
    pub lhs_pp: f64,
    /// `dist_2(decoded, x)`.
    pub lhs_2p: f64,
    pub rhs_pp: Option<f64>,
    pub rhs_2p: Option<f64>,
    pub ratio_pp: Option<f64>,
    pub ratio_2p: Option<f64>,
    pub satisfied_pp: Option<bool>,
    pub satisfied_2p: Option<bool>,
    pub success: bool,
    pub residual: f64,
    pub objective: f64,
    pub outer_iters: usize,
    pub converged: bool,
    pub restart_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Deterministic nearest-rank quantiles of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
}

pub(crate) fn quantile(sorted: &[f64], f: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = ((sorted.len() - 1) as f64 * f).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

impl Quantiles {
    pub(crate) fn from_values(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(Quantiles {
            q25: quantile(&v, 0.25),
            q50: quantile(&v, 0.50),
            q75: quantile(&v, 0.75),
            q90: quantile(&v, 0.90),
            max: *v.last().unwrap(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformAggregates {
    pub trials: usize,
    pub success_rate: f64,
    pub converged_rate: f64,
    /// Fraction of satisfied bounds among trials where constants existed.
    pub satisfied_pp_rate: Option<f64>,
    pub satisfied_2p_rate: Option<f64>,
    /// Trials whose empirical constants were unavailable.
    pub bounds_missing: usize,
    pub max_ratio_pp: Option<f64>,
    pub max_ratio_2p: Option<f64>,
    pub lhs_2p_quantiles: Quantiles,
}

/// Fixed-signal campaign: one signal, a fresh matrix per trial, recording
/// `dist_2(decoded, x0) / sigma_k(x0)_2` per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonuniformConfig {
    pub x0: SignalVector,
    pub m: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub decoder: DecoderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub trial_index: usize,
    pub dist2: f64,
    pub sigma_k2: f64,
    /// `dist2 / sigma_k2`; `None` (flagged) when the reference error is zero,
    /// in which case `dist2` itself is the reported quantity.
    pub ratio: Option<f64>,
    pub flagged: bool,
    pub converged: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioAggregates {
    pub trials: usize,
    pub flagged: usize,
    pub converged_rate: f64,
    pub ratio_quantiles: Option<Quantiles>,
    pub raw_distance_quantiles: Option<Quantiles>,
}

/// Null-space concentration probe across ambient dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullspaceProbeConfig {
    #[serde(default = "default_probe_field")]
    pub field: Field,
    pub n_list: Vec<usize>,
    pub m: usize,
    pub k: usize,
    #[serde(default = "default_probe_samples")]
    pub samples_per_n: usize,
    #[serde(default = "default_probe_refine")]
    pub refine_rounds: usize,
    pub seed: u64,
}

fn default_probe_field() -> Field {
    Field::Real
}

fn default_probe_samples() -> usize {
    200
}

fn default_probe_refine() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceRecord {
    pub n: usize,
    pub n_over_m: f64,
    pub null_dim: usize,
    /// Worst observed `||v||_2 / ||v restricted off its top-2k entries||_2`
    /// over sampled null vectors; always >= 1.
    pub worst_ratio: f64,
    pub mean_ratio: f64,
    pub regenerated: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceAggregates {
    pub worst_ratio_overall: f64,
    pub nondecreasing_in_n: bool,
    /// `(n/m, worst ratio)` rows, in `n_list` order.
    pub trend: Vec<(f64, f64)>,
}

/// Error-versus-noise sweep around a base campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSweepConfig {
    pub base: ExperimentConfig,
    /// Noise levels relative to `|| |Ax| ||_2`, per trial.
    pub eta_rel_list: Vec<f64>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

fn default_bootstrap() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseTrialRecord {
    pub eta_index: usize,
    pub eta_rel: f64,
    pub eta_abs: f64,
    pub record: TrialRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepAggregates {
    /// `(mean eta_abs, median dist_2)` per level, in `eta_rel_list` order.
    pub medians: Vec<(f64, f64)>,
    /// Least-squares slope of median error against noise level.
    pub slope: f64,
    pub slope_ci_low: f64,
    pub slope_ci_high: f64,
}

/// A persisted campaign: config echo, per-trial records, and aggregates that
/// always equal recomputation from the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub toolkit_version: String,
    /// Excluded from determinism comparisons.
    pub wall_clock_seconds: f64,
    pub payload: CampaignPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "campaign", rename_all = "snake_case")]
pub enum CampaignPayload {
    Uniform {
        config: ExperimentConfig,
        records: Vec<TrialRecord>,
        aggregates: UniformAggregates,
    },
    Nonuniform {
        config: NonuniformConfig,
        records: Vec<RatioRecord>,
        aggregates: RatioAggregates,
    },
    NullspaceProbe {
        config: NullspaceProbeConfig,
        records: Vec<NullspaceRecord>,
        aggregates: NullspaceAggregates,
    },
    NoiseSweep {
        config: NoiseSweepConfig,
        records: Vec<NoiseTrialRecord>,
        aggregates: NoiseSweepAggregates,
    },
}

impl CampaignReport {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            CampaignPayload::Uniform { .. } => "uniform",
            CampaignPayload::Nonuniform { .. } => "nonuniform",
            CampaignPayload::NullspaceProbe { .. } => "nullspace_probe",
            CampaignPayload::NoiseSweep { .. } => "noise_sweep",
        }
    }

    /// Copy with the wall clock zeroed, for byte-level determinism checks.
    pub fn without_wall_clock(&self) -> CampaignReport {
        let mut c = self.clone();
        c.wall_clock_seconds = 0.0;
        c
    }
}
