use proptest::prelude::*;

use radon_core::convex_sim::{
    chord, make_isotropic_body, run_zero_one_experiment, sample_line, sample_point, simplex_pushforward,
    slab_chord_ratio, slab_threshold, slab_volume_fraction, BodyDescriptor, BodyKind, LineExperiment, RatioKind,
};
use radon_core::mc::{chunk_rng, ks_statistic, moments, sample_chunked};
use radon_core::sphere_sim::{sample_unit_vector, UnitVector};

const KINDS: [BodyKind; 3] = [BodyKind::Ball, BodyKind::Cube, BodyKind::Simplex];

fn isotropy_check(body: &BodyDescriptor, samples: usize, seed: u64) {
    let n = body.n();
    let points = sample_chunked(samples, seed, |rng| sample_point(body, rng));
    for i in 0..n {
        let xi: Vec<f64> = points.iter().map(|p| p[i]).collect();
        let m = moments(&xi);
        assert!(m.mean.abs() <= 4.0 * m.std_error, "{:?} mean {i}", body.kind());
        for j in 0..=i {
            let prod: Vec<f64> = points.iter().map(|p| p[i] * p[j]).collect();
            let m = moments(&prod);
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((m.mean - target).abs() <= 4.0 * m.std_error, "{:?} cov {i},{j}: {}", body.kind(), m.mean);
        }
    }
}

#[test]
fn bodies_are_isotropic() {
    for kind in KINDS {
        isotropy_check(&make_isotropic_body(kind, 2).unwrap(), 100_000, 1);
        isotropy_check(&make_isotropic_body(kind, 5).unwrap(), 100_000, 2);
    }
}

#[test]
fn cube_coordinates_are_uniform() {
    let body = make_isotropic_body(BodyKind::Cube, 4).unwrap();
    let s = 12f64.sqrt();
    let xs = sample_chunked(100_000, 5, |rng| sample_point(&body, rng)[3]);
    assert!(ks_statistic(&xs, |t| (t / s + 0.5).clamp(0.0, 1.0)) <= 0.01);
}

#[test]
fn chords_end_on_the_boundary() {
    for kind in KINDS {
        for n in [3, 20, 200] {
            let body = make_isotropic_body(kind, n).unwrap();
            let mut rng = chunk_rng(n as u64, 3);
            for _ in 0..10_000 {
                let line = sample_line(&body, &mut rng);
                let c = chord(&body, &line).unwrap();
                let at = |t: f64| -> Vec<f64> {
                    line.point.iter().zip(line.direction.coords()).map(|(p, d)| p + t * d).collect()
                };
                assert!(body.membership_residual(&at(c.t_minus)).abs() <= 1e-9, "{kind:?} n={n}");
                assert!(body.membership_residual(&at(c.t_plus)).abs() <= 1e-9, "{kind:?} n={n}");
                assert!(body.contains(&at(0.5 * (c.t_minus + c.t_plus))));
            }
        }
    }
}

#[test]
fn exact_ratio_dichotomy_against_dense_sampling() {
    for kind in KINDS {
        let body = make_isotropic_body(kind, 10).unwrap();
        let slab = slab_threshold(&body, &UnitVector::basis(10, 0).into_inner(), 0.01, 4).unwrap();
        let mut rng = chunk_rng(8, 8);
        for _ in 0..2000 {
            let line = sample_line(&body, &mut rng);
            let c = chord(&body, &line).unwrap();
            let r = slab_chord_ratio(&slab, &line, &c);
            let inside: Vec<bool> = (0..1000)
                .map(|i| {
                    let t = c.t_minus + c.length() * (i as f64 + 0.5) / 1000.0;
                    let u: f64 = line
                        .point
                        .iter()
                        .zip(line.direction.coords())
                        .zip(&slab.xi)
                        .map(|((p, d), x)| (p + t * d) * x)
                        .sum();
                    u.abs() >= slab.threshold
                })
                .collect();
            let frac = inside.iter().filter(|&&b| b).count() as f64 / 1000.0;
            match r.kind {
                RatioKind::One => assert!(inside.iter().all(|&b| b)),
                RatioKind::Zero => assert!(inside.iter().all(|&b| !b)),
                RatioKind::Interior => {
                    assert!(r.ratio > 0.0 && r.ratio < 1.0);
                    assert!((frac - r.ratio).abs() <= 2e-3);
                }
                RatioKind::Degenerate => panic!("zero-length chord"),
            }
        }
    }
}

#[test]
fn slab_thresholds_split_volume_in_half() {
    for kind in KINDS {
        let body = make_isotropic_body(kind, 30).unwrap();
        let xi = sample_unit_vector(30, &mut chunk_rng(6, 6)).unwrap().into_inner();
        for dir in [UnitVector::basis(30, 0).into_inner(), xi] {
            let slab = slab_threshold(&body, &dir, 0.01, 11).unwrap();
            let frac = slab_volume_fraction(&body, &slab, 100_000, 12);
            assert!((frac - 0.5).abs() <= 0.01, "{kind:?}: {frac}");
        }
    }
}

#[test]
fn zero_one_fraction_grows_with_dimension() {
    for kind in KINDS {
        let runs: Vec<(f64, f64)> = [100, 300, 1000]
            .iter()
            .map(|&n| {
                let body = make_isotropic_body(kind, n).unwrap();
                let r = run_zero_one_experiment(&LineExperiment::new(body, 3000, 21)).unwrap();
                (r.metric("zero_one_fraction").unwrap(), r.metric("zero_one_std_error").unwrap())
            })
            .collect();
        for w in runs.windows(2) {
            let se = w[0].1.hypot(w[1].1);
            assert!(w[1].0 >= w[0].0 - 2.0 * se, "{kind:?}: {runs:?}");
        }
    }
}

#[test]
fn pushforward_marginals_are_beta() {
    for n in [3usize, 10] {
        let ys = sample_chunked(100_000, 13 + n as u64, |rng| {
            let x = sample_unit_vector(2 * n + 2, rng).unwrap().into_inner();
            simplex_pushforward(&x).unwrap()
        });
        for j in [0, n - 1] {
            let marginal: Vec<f64> = ys.iter().map(|y| y[j]).collect();
            let ks = ks_statistic(&marginal, |t| 1.0 - (1.0 - t.clamp(0.0, 1.0)).powi(n as i32));
            assert!(ks <= 0.01, "n={n} j={j}: {ks}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_contains_the_point(kind_idx in 0usize..3, n in 2usize..100, seed in any::<u64>()) {
        let body = make_isotropic_body(KINDS[kind_idx], n).unwrap();
        let line = sample_line(&body, &mut chunk_rng(seed, 0));
        let c = chord(&body, &line).unwrap();
        prop_assert!(c.t_minus <= 0.0 && c.t_plus >= 0.0);
        prop_assert!(c.length() <= body.diameter() * (1.0 + 1e-12));
    }

    #[test]
    fn ratio_in_unit_interval(kind_idx in 0usize..3, n in 2usize..60, seed in any::<u64>()) {
        let body = make_isotropic_body(KINDS[kind_idx], n).unwrap();
        let slab = slab_threshold(&body, &UnitVector::basis(n, 0).into_inner(), 0.05, seed).unwrap();
        let line = sample_line(&body, &mut chunk_rng(seed, 1));
        let r = slab_chord_ratio(&slab, &line, &chord(&body, &line).unwrap());
        prop_assert!((0.0..=1.0).contains(&r.ratio));
        prop_assert_eq!(r.is_zero_one(), r.ratio == 0.0 && r.kind == RatioKind::Zero || r.ratio == 1.0 && r.kind == RatioKind::One);
    }

    #[test]
    fn pushforward_lands_in_simplex(n in 1usize..40, seed in any::<u64>()) {
        let x = sample_unit_vector(2 * n + 2, &mut chunk_rng(seed, 2)).unwrap().into_inner();
        let y = simplex_pushforward(&x).unwrap();
        prop_assert_eq!(y.len(), n);
        prop_assert!(y.iter().all(|&v| v >= 0.0));
        prop_assert!(y.iter().sum::<f64>() <= 1.0 + 1e-12);
    }
}
