//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p phaseless --test acceptance -- --nocapture` to see
//! the per-criterion lines and the measured values behind them.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use phaseless::bounds::required_sparsity_level;
use phaseless::decode::{DecoderConfig, DecoderKind};
use phaseless::experiment::{
    BoundMode, CampaignPayload, ExperimentConfig, NoiseSweepConfig,
};
use phaseless::*;

fn verdict(num: u32, ok: bool, desc: &str, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {num:02} [{tag}] {desc} ({detail})");
    assert!(ok, "criterion {num:02} failed: {desc} ({detail})");
}

#[test]
fn criterion_01_beta0_reference_values() {
    let br = beta0(Field::Real);
    let bc = beta0(Field::Complex);
    let ok = (br - 1.659).abs() < 1e-3 && (bc - 2.159).abs() < 1e-3;
    verdict(
        1,
        ok,
        "beta0 matches 1.659 (real) and 2.159 (complex) to three decimals",
        &format!("got {br:.6} and {bc:.6}"),
    );
}

#[test]
fn criterion_02_p1_constants_match_closed_forms() {
    // Independent evaluation of the p = 1 closed forms.
    let closed = |l: f64, u: f64, r: f64| -> [f64; 4] {
        let q = u / l;
        let den = 1.0 - q * (2.0 / r).sqrt();
        let c1 = 2.0 * q * (1.0 / r.sqrt() + 1.0) * (2.0 + r).sqrt() / den + 2.0;
        let d1 = (1.0 / l) * 2.0 * (2.0 + r).sqrt() / den;
        let c2 = q * (1.0 / r.sqrt() + 1.0) * (1.0 + 1.0 / (r / 2.0).sqrt()) / den
            + 1.0 / r.sqrt()
            + 1.0;
        let d2 = (1.0 / l) * 2.0 * (1.0 + 1.0 / (r / 2.0).sqrt()) / den;
        [c1, c2, d1, d2]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let l = 0.5 + 1.5 * rng.random::<f64>();
        let q = 1.0 + 1.5 * rng.random::<f64>();
        let r = 2.0 * q * q * (1.05 + 4.0 * rng.random::<f64>());
        if r_margin(l, l * q, r, 1.0) <= 0.0 {
            continue;
        }
        let c = instance_constants(l, l * q, r, 1.0, 3).unwrap();
        let expect = closed(l, l * q, r);
        for (got, want) in [c.c1, c.c2, c.d1, c.d2].iter().zip(expect.iter()) {
            worst = worst.max((got - want).abs() / want.abs());
        }
        count += 1;
    }
    verdict(
        2,
        worst < 1e-12,
        "p = 1 constants equal the closed forms on 1000 random valid inputs",
        &format!("worst relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_03_default_radius_feasible_for_all_p() {
    let mut min_margin = f64::INFINITY;
    let mut ok = true;
    for field in [Field::Real, Field::Complex] {
        for p in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let m = gaussian_r_margin(field, 10.0, p);
            ok &= m > 0.0;
            min_margin = min_margin.min(m);
        }
    }
    verdict(
        3,
        ok,
        "r = 10 margin positive for p in {0.1..1.0}, both fields",
        &format!("smallest margin {min_margin:.4}"),
    );
}

#[test]
fn criterion_04_magnitude_perturbation_inequality() {
    // || |x| - |z| ||_2 - ||y||_2 <= || |x+y| - |z| ||_2
    //                             <= || |x| - |z| ||_2 + ||y||_2
    let mut worst_slack: f64 = f64::INFINITY;
    let dim = 12;
    for field in [Field::Real, Field::Complex] {
        let mut rng = ChaCha8Rng::seed_from_u64(404 + field as u64);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            (0..dim)
                .map(|_| match field {
                    Field::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
                    Field::Complex => Complex64::new(
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                    ),
                })
                .collect()
        };
        for _ in 0..100_000 {
            let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let norm_y: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let base: f64 = x
                .iter()
                .zip(z.iter())
                .map(|(a, c)| (a.norm() - c.norm()).powi(2))
                .sum::<f64>()
                .sqrt();
            let mid: f64 = x
                .iter()
                .zip(y.iter())
                .zip(z.iter())
                .map(|((a, b), c)| ((a + b).norm() - c.norm()).powi(2))
                .sum::<f64>()
                .sqrt();
            worst_slack = worst_slack
                .min(mid - (base - norm_y))
                .min((base + norm_y) - mid);
        }
    }
    verdict(
        4,
        worst_slack >= -1e-10,
        "two-sided magnitude perturbation inequality over 2x100000 triples",
        &format!("worst slack {worst_slack:.2e}"),
    );
}

#[test]
fn criterion_05_heuristic_matches_oracle_on_tiny_instances() {
    let mut matched = 0usize;
    let mut feasible = 0usize;
    let trials = 100usize;
    for t in 0..trials {
        let seed = 9000 + t as u64;
        let n = 5 + t % 4; // 5..=8
        let m = 8 + t % 3; // 8..=10
        let k = 1 + t % 2; // 1..=2
        let a = gaussian_matrix(Field::Real, m, n, derive_seed(seed, 1)).unwrap();
        let x = sample_signal(SignalKind::ExactlySparse, n, k, Field::Real, derive_seed(seed, 2))
            .unwrap();
        let y = phaseless_measure(&a, &x, None).unwrap();

        let oracle = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();
        let cfg = DecoderConfig {
            seed: derive_seed(seed, 3),
            restarts: 12,
            max_outer_iters: 800,
            ..DecoderConfig::default()
        };
        let heur = multi_restart(DecoderKind::L1, &a, &y, &cfg).unwrap();

        // Global optimality of the oracle on every instance.
        assert!(
            oracle.objective <= heur.objective + 1e-8,
            "trial {t}: oracle {} vs heuristic {}",
            oracle.objective,
            heur.objective
        );
        // The true signal is feasible, so the minimum is at most its norm.
        assert!(oracle.objective <= x.norm_q(1.0) + 1e-8);

        if (heur.objective - oracle.objective).abs() <= 1e-6 {
            matched += 1;
        }
        if heur.residual <= cfg.eta + cfg.feasibility_tol * y.norm2() * 1.001 {
            feasible += 1;
        }
    }
    verdict(
        5,
        matched >= 95 && feasible == trials,
        "restarted l1 decoder matches the exact oracle objective",
        &format!("{matched}/100 matched within 1e-6, {feasible}/100 feasible"),
    );
}

#[test]
fn criterion_06_analytic_ratio_probes() {
    let m = 5000;
    let seeds = 50u64;
    let mut sums = [0.0f64; 3]; // real orth, complex orth, colinear
    for s in 0..seeds {
        let ar = gaussian_matrix(Field::Real, m, 2, derive_seed(77, s)).unwrap();
        let ac = gaussian_matrix(Field::Complex, m, 2, derive_seed(78, s)).unwrap();
        let e1r = SignalVector::real(vec![1.0, 0.0]).unwrap();
        let e2r = SignalVector::real(vec![0.0, 1.0]).unwrap();
        let e1c = SignalVector::complex(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let e2c = SignalVector::complex(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let norm = (m as f64).sqrt();
        sums[0] += lipschitz_ratio(&ar, &e1r, &e2r).unwrap() / norm;
        sums[1] += lipschitz_ratio(&ac, &e1c, &e2c).unwrap() / norm;
        sums[2] += lipschitz_ratio(&ar, &e1r, &e1r.scaled(2.0)).unwrap() / norm;
    }
    let avg: Vec<f64> = sums.iter().map(|s| s / seeds as f64).collect();
    let real_target = (1.0 - 2.0 / std::f64::consts::PI).sqrt(); // 0.6028
    let complex_target = (1.0 - std::f64::consts::PI / 4.0).sqrt(); // 0.4633
    let ok = (avg[0] - real_target).abs() <= 0.05 * real_target
        && (avg[1] - complex_target).abs() <= 0.05 * complex_target
        && (avg[2] - 1.0).abs() <= 0.05;
    verdict(
        6,
        ok,
        "orthogonal/colinear probe ratios match closed-form expectations",
        &format!(
            "real {:.4} (target {real_target:.4}), complex {:.4} (target {complex_target:.4}), \
             colinear {:.4} (target 1)",
            avg[0], avg[1], avg[2]
        ),
    );
}

#[test]
fn criterion_07_field_separation_of_condition_ratios() {
    let runs = 50u64;
    let mut complex_wins = 0usize;
    for s in 0..runs {
        let ar = gaussian_matrix(Field::Real, 4000, 4, derive_seed(500, s)).unwrap();
        let ac = gaussian_matrix(Field::Complex, 4000, 4, derive_seed(600, s)).unwrap();
        let er = estimate_bilipschitz(&ar, 4, 150, 25, derive_seed(700, s)).unwrap();
        let ec = estimate_bilipschitz(&ac, 4, 150, 25, derive_seed(800, s)).unwrap();
        if ec.u_hat / ec.l_hat > er.u_hat / er.l_hat {
            complex_wins += 1;
        }
    }
    verdict(
        7,
        complex_wins >= 45,
        "complex condition ratio exceeds the real one across seeds",
        &format!("{complex_wins}/50 runs"),
    );
}

#[test]
fn criterion_08_exact_recovery_regime() {
    let n = 128usize;
    let k = 5usize;
    let m = (5.0 * k as f64 * (std::f64::consts::E * n as f64 / k as f64).ln()).ceil() as usize;
    let cfg = ExperimentConfig {
        field: Field::Complex,
        n,
        k,
        m: Some(m),
        gamma: 5.0,
        p: 1.0,
        eta: 0.0,
        signal: SignalKind::ExactlySparse,
        trials: 100,
        seed: 31_415,
        decoder: DecoderConfig {
            restarts: 3,
            max_outer_iters: 500,
            max_inner_iters: 8,
            ..DecoderConfig::default()
        },
        bounds: BoundMode::Strict {
            l: 1.0,
            u: 1.67,
            r: 10.0,
        },
        success_rtol: 1e-3,
    };
    let report = run_uniform_campaign(&cfg).unwrap();
    let CampaignPayload::Uniform { aggregates, .. } = &report.payload else {
        unreachable!()
    };
    let successes = (aggregates.success_rate * cfg.trials as f64).round() as usize;
    verdict(
        8,
        successes >= 90,
        "sparse complex signals recover exactly at the sampled rate (m = 107)",
        &format!("{successes}/100 trials with dist_2 <= 1e-3 * ||x||"),
    );
}

#[test]
fn criterion_09_bound_checks_on_oracle_trials() {
    let trials = 50usize;
    let r = 1000.0;
    let kappa = 2.0;
    let (n, m, k) = (8usize, 12usize, 2usize);
    let mut dilated_ok = 0usize;
    let mut strict_ok = 0usize;
    let mut strict_total = 0usize;
    for t in 0..trials {
        let seed = 40_000 + t as u64;
        let a = gaussian_matrix(Field::Real, m, n, derive_seed(seed, 1)).unwrap();
        let x = sample_signal(
            SignalKind::FlatTail { epsilon: 0.1 },
            n,
            k,
            Field::Real,
            derive_seed(seed, 2),
        )
        .unwrap();
        let y = phaseless_measure(&a, &x, None).unwrap();
        let result = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();

        let level = required_sparsity_level(r, k).min(n);
        let est = estimate_bilipschitz(&a, level, 300, 10, derive_seed(seed, 3)).unwrap();

        // Empirical mode with the safety dilation: asserted.
        let cons = BoundConstants::from_estimate(&est, r, 1.0, k, kappa).unwrap();
        let pp = check_instance_bound(&result, &x, &cons, 0.0, NormPair::PP).unwrap();
        let tp = check_instance_bound(&result, &x, &cons, 0.0, NormPair::TwoP).unwrap();
        if pp.satisfied && tp.satisfied {
            dilated_ok += 1;
        }

        // Strict mode with the raw extremes: reported, not asserted.
        if let Ok(raw) = BoundConstants::from_estimate(&est, r, 1.0, k, 1.0) {
            strict_total += 1;
            let spp = check_instance_bound(&result, &x, &raw, 0.0, NormPair::PP).unwrap();
            let stp = check_instance_bound(&result, &x, &raw, 0.0, NormPair::TwoP).unwrap();
            if spp.satisfied && stp.satisfied {
                strict_ok += 1;
            }
        }
    }
    println!(
        "criterion 09 [info] strict-mode (undilated) bounds satisfied in {strict_ok}/{strict_total} trials"
    );
    verdict(
        9,
        dilated_ok == trials,
        "dilated empirical bounds hold on every oracle-solved flat-tail trial",
        &format!("{dilated_ok}/{trials} trials"),
    );
}

#[test]
fn criterion_10_noise_linearity() {
    let base = ExperimentConfig {
        field: Field::Complex,
        n: 32,
        k: 3,
        m: None,
        gamma: 5.0,
        p: 1.0,
        eta: 0.0,
        signal: SignalKind::ExactlySparse,
        trials: 16,
        seed: 2_718,
        decoder: DecoderConfig {
            restarts: 3,
            max_outer_iters: 400,
            ..DecoderConfig::default()
        },
        bounds: BoundMode::Strict {
            l: 1.0,
            u: 1.67,
            r: 10.0,
        },
        success_rtol: 1e-3,
    };
    let sweep = NoiseSweepConfig {
        base,
        eta_rel_list: vec![0.0, 0.05, 0.1, 0.2],
        bootstrap: 200,
    };
    let report = run_noise_sweep(&sweep).unwrap();
    let CampaignPayload::NoiseSweep { aggregates, .. } = &report.payload else {
        unreachable!()
    };
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("noise_sweep.json");
    persist_report(&report, &out).unwrap();
    let ok = aggregates.slope > 0.0 && aggregates.slope.is_finite();
    verdict(
        10,
        ok,
        "median error grows with the noise level at a finite positive slope",
        &format!(
            "slope {:.3} (95% bootstrap [{:.3}, {:.3}]), report archived at {}",
            aggregates.slope,
            aggregates.slope_ci_low,
            aggregates.slope_ci_high,
            out.display()
        ),
    );
}

#[test]
fn criterion_11_bitwise_determinism() {
    // Campaign reruns.
    let cfg = ExperimentConfig {
        field: Field::Complex,
        n: 16,
        k: 2,
        m: Some(14),
        gamma: 5.0,
        p: 1.0,
        eta: 0.05,
        signal: SignalKind::PowerDecay { alpha: 1.0 },
        trials: 6,
        seed: 99,
        decoder: DecoderConfig {
            restarts: 2,
            max_outer_iters: 150,
            ..DecoderConfig::default()
        },
        bounds: BoundMode::Empirical {
            r: 400.0,
            kappa: 2.0,
            pairs: 50,
            refine: 5,
        },
        success_rtol: 1e-4,
    };
    let r1 = run_uniform_campaign(&cfg).unwrap().without_wall_clock();
    let r2 = run_uniform_campaign(&cfg).unwrap().without_wall_clock();
    let same_campaign = serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap();

    // Estimate reruns.
    let a = gaussian_matrix(Field::Complex, 60, 8, 5).unwrap();
    let e1 = estimate_bilipschitz(&a, 4, 80, 10, 7).unwrap();
    let e2 = estimate_bilipschitz(&a, 4, 80, 10, 7).unwrap();

    // Decode reruns.
    let x = sample_signal(SignalKind::ExactlySparse, 8, 2, Field::Complex, 3).unwrap();
    let y = phaseless_measure(&a, &x, None).unwrap();
    let dcfg = DecoderConfig {
        seed: 12,
        restarts: 3,
        ..DecoderConfig::default()
    };
    let d1 = decode_l1(&a, &y, &dcfg).unwrap();
    let d2 = decode_l1(&a, &y, &dcfg).unwrap();

    let ok = same_campaign && e1 == e2 && d1 == d2;
    verdict(
        11,
        ok,
        "campaigns, estimates, and decodes rerun bit-identically",
        &format!("campaign {same_campaign}, estimate {}, decode {}", e1 == e2, d1 == d2),
    );
}
