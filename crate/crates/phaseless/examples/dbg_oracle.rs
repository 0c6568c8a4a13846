use phaseless::decode::{DecoderConfig, DecoderKind};
use phaseless::*;

fn main() {
    for rho in [1.0f64, 3.0, 5.0] {
        for (n_lo, n_hi, m_lo, m_hi) in [(4usize, 6usize, 8usize, 10usize), (5, 8, 8, 10)] {
            let mut matched = 0;
            let mut feasible = 0;
            let trials = 100;
            for t in 0..trials {
                let seed = 9000 + t as u64;
                let n = n_lo + t % (n_hi - n_lo + 1);
                let m = m_lo + t % (m_hi - m_lo + 1);
                let k = 1 + t % 2;
                let a = gaussian_matrix(Field::Real, m, n, derive_seed(seed, 1)).unwrap();
                let x = sample_signal(SignalKind::ExactlySparse, n, k, Field::Real, derive_seed(seed, 2)).unwrap();
                let y = phaseless_measure(&a, &x, None).unwrap();
                let oracle = oracle_decode_real(&a, &y, 1.0, 0.0).unwrap();
                let cfg = DecoderConfig {
                    seed: derive_seed(seed, 3),
                    restarts: 12,
                    max_outer_iters: 800,
                    penalty_rho: rho,
                    ..DecoderConfig::default()
                };
                let heur = multi_restart(DecoderKind::L1, &a, &y, &cfg).unwrap();
                let feas = heur.residual <= cfg.feasibility_tol * y.norm2() * 1.001;
                if feas { feasible += 1; }
                if feas && (heur.objective - oracle.objective).abs() <= 1e-6 { matched += 1; }
                if feas && heur.objective < oracle.objective - 1e-8 {
                    println!("  !! undercut at t={t}");
                }
            }
            println!("rho={rho} n in {n_lo}..{n_hi}, m in {m_lo}..{m_hi}: matched {matched}/100, feasible {feasible}/100");
        }
    }
}
