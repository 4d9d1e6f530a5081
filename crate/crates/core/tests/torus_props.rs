use proptest::prelude::*;

use radon_core::mc::chunk_rng;
use radon_core::torus_sim::{
    apply_s, eigen_check, radon_conjugate, radon_transform, run_torus_experiment, EigenMode, ProgressionFunction,
    TorusConfig, TorusFunction, TorusMode, TorusSet,
};
use rand::Rng;

#[test]
fn exact_spectrum_for_small_tori() {
    for p in [3u64, 5, 7] {
        for n in 1..=3u32 {
            let cfg = TorusConfig::with_budget(p, n, 20_000).unwrap();
            if cfg.progression_count() > cfg.budget() {
                continue;
            }
            let lambda = cfg.lambda_sq();
            for row in eigen_check(&cfg, EigenMode::Exact).unwrap() {
                let expected = if row.y.iter().all(|&c| c == 0) {
                    (1, 1)
                } else {
                    (*lambda.numer(), *lambda.denom())
                };
                assert_eq!(row.exact, Some(expected), "p={p} n={n} y={:?}", row.y);
            }
        }
    }
}

#[test]
fn float_spectrum_matches_exact() {
    for (p, n) in [(3, 2), (5, 2), (3, 3)] {
        let cfg = TorusConfig::new(p, n).unwrap();
        for row in eigen_check(&cfg, EigenMode::Float).unwrap() {
            assert!((row.ratio - row.expected).abs() < 1e-12);
            assert!(row.residual < 1e-12);
        }
    }
}

#[test]
fn chebyshev_variance_is_exact_exhaustively() {
    for (p, n) in [(3, 2), (5, 2), (3, 3), (7, 2)] {
        let cfg = TorusConfig::new(p, n).unwrap();
        for seed in 0..5 {
            let set = TorusSet::random_half(&cfg, seed);
            let r = run_torus_experiment(&cfg, &set, TorusMode::Exhaustive).unwrap();
            assert!((r.variance - r.predicted_variance).abs() <= 1e-12 * r.predicted_variance);
            assert!(r.chebyshev_bound <= 0.5 + 1e-12);
        }
    }
}

#[test]
fn exhaustive_results_ignore_worker_count() {
    let cfg = TorusConfig::new(5, 2).unwrap();
    let set = TorusSet::random_half(&cfg, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_torus_experiment(&cfg, &set, TorusMode::Exhaustive).unwrap())
    };
    assert_eq!(run(1), run(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adjointness_on_orbit_invariant_functions(pi in 0usize..2, seed in any::<u64>()) {
        let (p, n) = [(3u64, 2u32), (5, 2)][pi];
        let cfg = TorusConfig::new(p, n).unwrap();
        let mut rng = chunk_rng(seed, 0);
        let f = TorusFunction::new(cfg, (0..cfg.size()).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let g = ProgressionFunction::from_fn(cfg, |_, _| rng.random::<f64>() - 0.5).unwrap().symmetrize();
        let lhs = radon_transform(&f).unwrap().inner(&g);
        let rhs = f.inner(&radon_conjugate(&g));
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn s_acts_by_lambda_on_mean_zero(pi in 0usize..3, seed in any::<u64>()) {
        let (p, n) = [(3u64, 2u32), (5, 2), (3, 3)][pi];
        let cfg = TorusConfig::new(p, n).unwrap();
        let mut rng = chunk_rng(seed, 1);
        let raw: Vec<f64> = (0..cfg.size()).map(|_| rng.random::<f64>()).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let f = TorusFunction::new(cfg, raw.iter().map(|v| v - mean).collect()).unwrap();
        let s = apply_s(&f).unwrap();
        let lambda = *cfg.lambda_sq().numer() as f64 / *cfg.lambda_sq().denom() as f64;
        for (a, b) in s.values().iter().zip(f.values()) {
            prop_assert!((a - lambda * b).abs() < 1e-13);
        }
    }

    #[test]
    fn random_half_sets_have_floor_size(p_idx in 0usize..4, n in 1u32..4, seed in any::<u64>()) {
        let p = [3u64, 5, 7, 11][p_idx];
        let cfg = TorusConfig::new(p, n).unwrap();
        let set = TorusSet::random_half(&cfg, seed);
        prop_assert_eq!(set.len(), cfg.size() / 2);
    }
}
