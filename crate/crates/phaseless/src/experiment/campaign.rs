//! Campaign runners. Each trial derives every random object from
//! `derive_seed(master, trial)` sub-streams, so trial execution order and
//! thread count cannot influence any record.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bilipschitz::estimate_bilipschitz;
use crate::bounds::{
    check_instance_bound, instance_constants, required_sparsity_level, BoundConstants, NormPair,
};
use crate::decode::decode;
use crate::ensemble::{gaussian_matrix, phaseless_measure, MeasurementEnsemble, NoiseSpec};
use crate::error::{Error, Result};
use crate::field::{derive_seed, Field};
use crate::signal::{dist_2, dist_p, sample_signal, sigma_k, SignalVector};

use super::{
    BoundMode, CampaignPayload, CampaignReport, ExperimentConfig, NoiseSweepAggregates,
    NoiseSweepConfig, NoiseTrialRecord, NonuniformConfig, NullspaceAggregates,
    NullspaceProbeConfig, NullspaceRecord, Quantiles, RatioAggregates, RatioRecord, TrialRecord,
    UniformAggregates, SCHEMA_VERSION,
};

// Sub-stream tags inside one trial.
const STREAM_MATRIX: u64 = 0;
const STREAM_SIGNAL: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_DECODER: u64 = 3;
const STREAM_BILIPSCHITZ: u64 = 4;

fn report(payload: CampaignPayload, started: std::time::Instant) -> CampaignReport {
    CampaignReport {
        schema_version: SCHEMA_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        payload,
    }
}

/// Noise vector uniform on the sphere of radius `eta`.
fn sphere_noise(m: usize, eta: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; m];
    }
    g.into_iter().map(|v| v * eta / norm).collect()
}

fn failed_trial(trial_index: usize, err: &Error) -> TrialRecord {
    TrialRecord {
        trial_index,
        sigma_k_p: 0.0,
        sigma_k_2: 0.0,
        x_norm2: 0.0,
        lhs_pp: 0.0,
        lhs_2p: 0.0,
        rhs_pp: None,
        rhs_2p: None,
        ratio_pp: None,
        ratio_2p: None,
        satisfied_pp: None,
        satisfied_2p: None,
        success: false,
        residual: 0.0,
        objective: 0.0,
        outer_iters: 0,
        converged: false,
        restart_index: 0,
        warning: Some(format!("trial failed: {err}")),
    }
}

/// Constants (and an optional warning) for one trial's matrix.
fn trial_constants(
    mode: &BoundMode,
    a: &MeasurementEnsemble,
    p: f64,
    k: usize,
    seed: u64,
) -> (Option<BoundConstants>, Option<String>) {
    match *mode {
        BoundMode::Strict { l, u, r } => match instance_constants(l, u, r, p, k) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        },
        BoundMode::Empirical {
            r,
            kappa,
            pairs,
            refine,
        } => {
            let level = required_sparsity_level(r, k).min(a.cols()).max(1);
            match estimate_bilipschitz(a, level, pairs, refine, seed) {
                Ok(est) => match BoundConstants::from_estimate(&est, r, p, k, kappa) {
                    Ok(c) => (Some(c), None),
                    Err(e) => (None, Some(e.to_string())),
                },
                Err(e) => (None, Some(e.to_string())),
            }
        }
    }
}

/// One trial; returns the record plus the absolute noise level it used.
fn run_uniform_trial(
    cfg: &ExperimentConfig,
    m: usize,
    trial: usize,
    sweep_level: Option<(usize, f64)>,
) -> (TrialRecord, f64) {
    let st = derive_seed(cfg.seed, trial as u64);
    let a = match gaussian_matrix(cfg.field, m, cfg.n, derive_seed(st, STREAM_MATRIX)) {
        Ok(a) => a,
        Err(e) => return (failed_trial(trial, &e), 0.0),
    };
    let x = match sample_signal(cfg.signal, cfg.n, cfg.k, cfg.field, derive_seed(st, STREAM_SIGNAL))
    {
        Ok(x) => x,
        Err(e) => return (failed_trial(trial, &e), 0.0),
    };

    let clean = match phaseless_measure(&a, &x, None) {
        Ok(y) => y,
        Err(e) => return (failed_trial(trial, &e), 0.0),
    };
    // Either the config's absolute eta, or a sweep level relative to ||y||.
    let (eta, noise_stream) = match sweep_level {
        None => (cfg.eta, derive_seed(st, STREAM_NOISE)),
        Some((level, rel)) => (
            rel * clean.norm2(),
            derive_seed(derive_seed(st, STREAM_NOISE), level as u64),
        ),
    };
    let y = if eta > 0.0 {
        let e = sphere_noise(m, eta, noise_stream);
        let spec = match NoiseSpec::with_vector(eta, e) {
            Ok(s) => s,
            Err(e) => return (failed_trial(trial, &e), eta),
        };
        match phaseless_measure(&a, &x, Some(&spec)) {
            Ok(y) => y,
            Err(e) => return (failed_trial(trial, &e), eta),
        }
    } else {
        clean
    };

    let mut dec = cfg.decoder.clone();
    dec.p = cfg.p;
    dec.eta = eta;
    dec.seed = derive_seed(st, STREAM_DECODER);
    let result = match decode(&a, &y, &dec) {
        Ok(r) => r,
        Err(e) => return (failed_trial(trial, &e), eta),
    };

    let (constants, mut warning) = trial_constants(
        &cfg.bounds,
        &a,
        cfg.p,
        cfg.k,
        derive_seed(st, STREAM_BILIPSCHITZ),
    );

    let sigma_p = sigma_k(&x, cfg.k, cfg.p).unwrap_or(0.0);
    let sigma_2 = sigma_k(&x, cfg.k, 2.0).unwrap_or(0.0);
    let lhs_pp = dist_p(&result.solution, &x, cfg.p).unwrap_or(f64::MAX);
    let lhs_2p = dist_2(&result.solution, &x).unwrap_or(f64::MAX);

    let (mut rhs_pp, mut rhs_2p) = (None, None);
    let (mut ratio_pp, mut ratio_2p) = (None, None);
    let (mut satisfied_pp, mut satisfied_2p) = (None, None);
    if let Some(c) = &constants {
        match check_instance_bound(&result, &x, c, eta, NormPair::PP) {
            Ok(chk) => {
                rhs_pp = Some(chk.rhs);
                ratio_pp = chk.ratio;
                satisfied_pp = Some(chk.satisfied);
            }
            Err(e) => warning = Some(e.to_string()),
        }
        match check_instance_bound(&result, &x, c, eta, NormPair::TwoP) {
            Ok(chk) => {
                rhs_2p = Some(chk.rhs);
                ratio_2p = chk.ratio;
                satisfied_2p = Some(chk.satisfied);
            }
            Err(e) => warning = Some(e.to_string()),
        }
    }

    let x_norm2 = x.norm2();
    let record = TrialRecord {
        trial_index: trial,
        sigma_k_p: sigma_p,
        sigma_k_2: sigma_2,
        x_norm2,
        lhs_pp,
        lhs_2p,
        rhs_pp,
        rhs_2p,
        ratio_pp,
        ratio_2p,
        satisfied_pp,
        satisfied_2p,
        success: lhs_2p <= cfg.success_rtol * x_norm2,
        residual: result.residual,
        objective: result.objective,
        outer_iters: result.outer_iters,
        converged: result.converged,
        restart_index: result.restart_index,
        warning,
    };
    (record, eta)
}

pub(crate) fn compute_uniform_aggregates(records: &[TrialRecord]) -> UniformAggregates {
    let trials = records.len();
    let success = records.iter().filter(|r| r.success).count();
    let converged = records.iter().filter(|r| r.converged).count();
    let with_pp: Vec<&TrialRecord> = records.iter().filter(|r| r.satisfied_pp.is_some()).collect();
    let with_2p: Vec<&TrialRecord> = records.iter().filter(|r| r.satisfied_2p.is_some()).collect();
    let missing = records
        .iter()
        .filter(|r| r.rhs_pp.is_none() && r.rhs_2p.is_none())
        .count();
    let rate = |num: usize, den: usize| -> Option<f64> {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let max_opt = |vals: Vec<f64>| -> Option<f64> {
        vals.into_iter().fold(None, |acc, v| match acc {
            None => Some(v),
            Some(a) => Some(a.max(v)),
        })
    };
    let lhs: Vec<f64> = records.iter().map(|r| r.lhs_2p).collect();
    UniformAggregates {
        trials,
        success_rate: success as f64 / trials.max(1) as f64,
        converged_rate: converged as f64 / trials.max(1) as f64,
        satisfied_pp_rate: rate(
            with_pp.iter().filter(|r| r.satisfied_pp == Some(true)).count(),
            with_pp.len(),
        ),
        satisfied_2p_rate: rate(
            with_2p.iter().filter(|r| r.satisfied_2p == Some(true)).count(),
            with_2p.len(),
        ),
        bounds_missing: missing,
        max_ratio_pp: max_opt(records.iter().filter_map(|r| r.ratio_pp).collect()),
        max_ratio_2p: max_opt(records.iter().filter_map(|r| r.ratio_2p).collect()),
        lhs_2p_quantiles: Quantiles::from_values(&lhs).expect("trials >= 1"),
    }
}

/// Fresh `(A, x)` per trial; decode and evaluate both error bounds.
pub fn run_uniform_campaign(cfg: &ExperimentConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let m = cfg.resolved_m()?;
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_uniform_trial(cfg, m, t, None).0)
        .collect();
    let aggregates = compute_uniform_aggregates(&records);
    Ok(report(
        CampaignPayload::Uniform {
            config: cfg.clone(),
            records,
            aggregates,
        },
        started,
    ))
}

pub(crate) fn compute_ratio_aggregates(records: &[RatioRecord]) -> RatioAggregates {
    let flagged: Vec<f64> = records
        .iter()
        .filter(|r| r.flagged)
        .map(|r| r.dist2)
        .collect();
    let ratios: Vec<f64> = records.iter().filter_map(|r| r.ratio).collect();
    RatioAggregates {
        trials: records.len(),
        flagged: flagged.len(),
        converged_rate: records.iter().filter(|r| r.converged).count() as f64
            / records.len().max(1) as f64,
        ratio_quantiles: Quantiles::from_values(&ratios),
        raw_distance_quantiles: Quantiles::from_values(&flagged),
    }
}

/// Fixed signal `x0`, fresh Gaussian matrix per trial; records the ratio of
/// the recovery error to the best k-term reference error.
pub fn run_nonuniform_campaign(cfg: &NonuniformConfig) -> Result<CampaignReport> {
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if cfg.k == 0 || cfg.k > cfg.x0.len() {
        return Err(Error::invalid("k must satisfy 1 <= k <= len(x0)"));
    }
    if cfg.decoder.p != 1.0 {
        return Err(Error::invalid(
            "the fixed-signal campaign drives the l1 decoder; decoder.p must be 1",
        ));
    }
    let mut dec_probe = cfg.decoder.clone();
    dec_probe.eta = 0.0;
    dec_probe.validate()?;
    let started = std::time::Instant::now();

    let sigma = sigma_k(&cfg.x0, cfg.k, 2.0)?;
    let records: Vec<RatioRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let st = derive_seed(cfg.seed, t as u64);
            let a = gaussian_matrix(
                cfg.x0.field(),
                cfg.m,
                cfg.x0.len(),
                derive_seed(st, STREAM_MATRIX),
            )
            .expect("validated dimensions");
            let y = phaseless_measure(&a, &cfg.x0, None).expect("validated dimensions");
            let mut dec = cfg.decoder.clone();
            dec.eta = 0.0;
            dec.seed = derive_seed(st, STREAM_DECODER);
            match decode(&a, &y, &dec) {
                Ok(r) => {
                    let d = dist_2(&r.solution, &cfg.x0).unwrap_or(f64::MAX);
                    let flagged = sigma <= 1e-14;
                    RatioRecord {
                        trial_index: t,
                        dist2: d,
                        sigma_k2: sigma,
                        ratio: if flagged { None } else { Some(d / sigma) },
                        flagged,
                        converged: r.converged,
                        residual: r.residual,
                    }
                }
                Err(_) => RatioRecord {
                    trial_index: t,
                    dist2: f64::MAX,
                    sigma_k2: sigma,
                    ratio: None,
                    flagged: true,
                    converged: false,
                    residual: f64::MAX,
                },
            }
        })
        .collect();
    let aggregates = compute_ratio_aggregates(&records);
    Ok(report(
        CampaignPayload::Nonuniform {
            config: cfg.clone(),
            records,
            aggregates,
        },
        started,
    ))
}

/// Orthonormal basis of the row space via twice-iterated Gram-Schmidt;
/// `None` when a row is numerically dependent.
fn orthonormal_rows(a: &MeasurementEnsemble) -> Option<Vec<Vec<Complex64>>> {
    let (m, n) = (a.rows(), a.cols());
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v: Vec<Complex64> = a.row(i).to_vec();
        let orig_norm = crate::signal::norm_q(&v, 2.0);
        for _ in 0..2 {
            for u in &q {
                let coef: Complex64 = u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u.iter()) {
                    *vi -= coef * ui;
                }
            }
        }
        let norm = crate::signal::norm_q(&v, 2.0);
        if norm <= 1e-10 * orig_norm.max(1.0) {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        q.push(v);
    }
    debug_assert_eq!(q.len(), m);
    let _ = n;
    Some(q)
}

/// Orthonormal basis of the null space, built by completing the row space
/// with standard basis vectors.
fn null_space_basis(a: &MeasurementEnsemble) -> Option<Vec<Vec<Complex64>>> {
    let (m, n) = (a.rows(), a.cols());
    if m >= n {
        return Some(Vec::new());
    }
    let q = orthonormal_rows(a)?;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n - m);
    for j in 0..n {
        if basis.len() == n - m {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[j] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in q.iter().chain(basis.iter()) {
                let coef: Complex64 = u.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u.iter()) {
                    *vi -= coef * ui;
                }
            }
        }
        let norm = crate::signal::norm_q(&v, 2.0);
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    if basis.len() == n - m {
        Some(basis)
    } else {
        None
    }
}

/// Concentration ratio of a null vector: total energy over the energy left
/// after removing its `2k` largest entries.
fn concentration_ratio(field: Field, v: &[Complex64], k2: usize) -> Option<f64> {
    let x = SignalVector::new(field, v.to_vec()).ok()?;
    let total = x.norm2();
    let tail = sigma_k(&x, k2.min(x.len()), 2.0).ok()?;
    if tail <= 1e-12 * total {
        None
    } else {
        Some(total / tail)
    }
}

fn probe_one_dimension(cfg: &NullspaceProbeConfig, n: usize) -> NullspaceRecord {
    let mut regenerated = 0usize;
    let mut basis = None;
    let mut attempt = 0u64;
    while basis.is_none() && attempt < 8 {
        let a = gaussian_matrix(
            cfg.field,
            cfg.m,
            n,
            derive_seed(derive_seed(cfg.seed, n as u64), attempt),
        )
        .expect("validated dimensions");
        basis = null_space_basis(&a);
        if basis.is_none() {
            regenerated += 1;
        }
        attempt += 1;
    }
    let basis = basis.expect("gaussian matrices are almost surely full rank");
    let dim = basis.len();
    let k2 = 2 * cfg.k;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x5EED ^ n as u64));
    let mut worst: Option<(f64, Vec<f64>)> = None;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut skipped = 0usize;

    let combine = |coef: &[f64], rng: &mut ChaCha8Rng, basis: &[Vec<Complex64>]| {
        // Coefficients are real draws; for complex fields a second draw adds
        // an imaginary component.
        let mut v = vec![Complex64::new(0.0, 0.0); basis[0].len()];
        for (c, b) in coef.iter().zip(basis.iter()) {
            let scale = if cfg.field == Field::Complex {
                Complex64::new(*c, rng.sample(StandardNormal))
            } else {
                Complex64::new(*c, 0.0)
            };
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi += scale * bi;
            }
        }
        v
    };

    for _ in 0..cfg.samples_per_n {
        let coef: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let v = combine(&coef, &mut rng, &basis);
        match concentration_ratio(cfg.field, &v, k2) {
            Some(r) => {
                sum += r;
                count += 1;
                if worst.as_ref().is_none_or(|(w, _)| r > *w) {
                    worst = Some((r, coef));
                }
            }
            None => skipped += 1,
        }
    }

    // Hill-climb from the worst sample toward more concentrated vectors.
    if let Some((mut best, mut coef)) = worst.take() {
        let mut delta = 0.5;
        for _ in 0..cfg.refine_rounds {
            let cand: Vec<f64> = coef
                .iter()
                .map(|c| c + delta * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let v = combine(&cand, &mut rng, &basis);
            match concentration_ratio(cfg.field, &v, k2) {
                Some(r) if r > best => {
                    best = r;
                    coef = cand;
                }
                _ => delta *= 0.7,
            }
        }
        worst = Some((best, coef));
    }

    let worst_ratio = worst.map(|(w, _)| w).unwrap_or(1.0);
    NullspaceRecord {
        n,
        n_over_m: n as f64 / cfg.m as f64,
        null_dim: dim,
        worst_ratio,
        mean_ratio: if count > 0 { sum / count as f64 } else { 1.0 },
        regenerated,
        skipped,
    }
}

pub(crate) fn compute_nullspace_aggregates(records: &[NullspaceRecord]) -> NullspaceAggregates {
    let trend: Vec<(f64, f64)> = records.iter().map(|r| (r.n_over_m, r.worst_ratio)).collect();
    let nondecreasing = records.windows(2).all(|w| w[1].worst_ratio >= w[0].worst_ratio);
    NullspaceAggregates {
        worst_ratio_overall: records
            .iter()
            .map(|r| r.worst_ratio)
            .fold(f64::NEG_INFINITY, f64::max),
        nondecreasing_in_n: nondecreasing,
        trend,
    }
}

/// For each ambient dimension, search the measurement null space for vectors
/// concentrated on few coordinates and report the worst concentration ratio
/// as a trend against `n/m`. No hard assertion is made; the output is a
/// trend table.
pub fn run_nullspace_probe(cfg: &NullspaceProbeConfig) -> Result<CampaignReport> {
    if cfg.n_list.is_empty() {
        return Err(Error::invalid("n_list must be nonempty"));
    }
    if cfg.m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    let min_n = *cfg.n_list.iter().min().unwrap();
    if cfg.m >= min_n {
        return Err(Error::invalid(format!(
            "probe requires m < min(n_list); got m = {} vs {}",
            cfg.m, min_n
        )));
    }
    if cfg.k == 0 || 2 * cfg.k >= cfg.m {
        return Err(Error::invalid("k must satisfy 1 <= 2k < m"));
    }
    if cfg.samples_per_n == 0 {
        return Err(Error::invalid("samples_per_n must be >= 1"));
    }
    let started = std::time::Instant::now();
    let records: Vec<NullspaceRecord> = cfg
        .n_list
        .par_iter()
        .map(|&n| probe_one_dimension(cfg, n))
        .collect();
    let aggregates = compute_nullspace_aggregates(&records);
    Ok(report(
        CampaignPayload::NullspaceProbe {
            config: cfg.clone(),
            records,
            aggregates,
        },
        started,
    ))
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let den: f64 = points.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    if den == 0.0 {
        return 0.0;
    }
    points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum::<f64>() / den
}

pub(crate) fn compute_noise_aggregates(
    cfg: &NoiseSweepConfig,
    records: &[NoiseTrialRecord],
) -> NoiseSweepAggregates {
    let levels = cfg.eta_rel_list.len();
    let trials = cfg.base.trials;
    let level_stats = |pick: &dyn Fn(usize) -> Vec<usize>| -> Vec<(f64, f64)> {
        (0..levels)
            .map(|j| {
                let idxs = pick(j);
                let abs: Vec<f64> = idxs
                    .iter()
                    .map(|&i| records[j * trials + i].eta_abs)
                    .collect();
                let lhs: Vec<f64> = idxs
                    .iter()
                    .map(|&i| records[j * trials + i].record.lhs_2p)
                    .collect();
                let mean_abs = abs.iter().sum::<f64>() / abs.len().max(1) as f64;
                let mut sorted = lhs;
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                (mean_abs, super::quantile(&sorted, 0.5))
            })
            .collect()
    };

    let all: Vec<usize> = (0..trials).collect();
    let medians = level_stats(&|_| all.clone());
    let slope = fit_slope(&medians);

    // Paired bootstrap over trial indices.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.base.seed, 0xB007));
    let mut slopes = Vec::with_capacity(cfg.bootstrap);
    for _ in 0..cfg.bootstrap {
        let resample: Vec<usize> = (0..trials).map(|_| rng.random_range(0..trials)).collect();
        let pts = level_stats(&|_| resample.clone());
        slopes.push(fit_slope(&pts));
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = if slopes.is_empty() {
        (slope, slope)
    } else {
        (
            super::quantile(&slopes, 0.025),
            super::quantile(&slopes, 0.975),
        )
    };
    NoiseSweepAggregates {
        medians,
        slope,
        slope_ci_low: lo,
        slope_ci_high: hi,
    }
}

/// Rerun the base campaign at each noise level (noise scaled relative to the
/// clean observation per trial) and fit the median error against the noise.
/// The zero level reproduces the noiseless campaign record for record.
pub fn run_noise_sweep(cfg: &NoiseSweepConfig) -> Result<CampaignReport> {
    cfg.base.validate()?;
    if cfg.eta_rel_list.is_empty() {
        return Err(Error::invalid("eta_rel_list must be nonempty"));
    }
    if cfg.eta_rel_list.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::invalid("noise levels must be >= 0"));
    }
    let started = std::time::Instant::now();
    let m = cfg.base.resolved_m()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.eta_rel_list.len())
        .flat_map(|j| (0..cfg.base.trials).map(move |t| (j, t)))
        .collect();
    let records: Vec<NoiseTrialRecord> = jobs
        .into_par_iter()
        .map(|(j, t)| {
            let rel = cfg.eta_rel_list[j];
            let (record, eta_abs) = run_uniform_trial(&cfg.base, m, t, Some((j, rel)));
            NoiseTrialRecord {
                eta_index: j,
                eta_rel: rel,
                eta_abs,
                record,
            }
        })
        .collect();
    let aggregates = compute_noise_aggregates(cfg, &records);
    Ok(report(
        CampaignPayload::NoiseSweep {
            config: cfg.clone(),
            records,
            aggregates,
        },
        started,
    ))
}
