use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use radon_core::specfun::quadrature::integrate;
use radon_core::specfun::{
    band_measure, band_threshold, gegenbauer_eval, gegenbauer_expansion, log_gamma, tau, BandSpec,
    GegenbauerParams,
};

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// C_ℓ^α(t) = Σ_j (-1)^j (α)_{ℓ-j} (2t)^{ℓ-2j} / (j! (ℓ-2j)!) in exact arithmetic,
// returning the value and the sum of absolute terms.
fn exact_expansion(n: u64, degree: u64, t: &BigRational) -> (BigRational, BigRational) {
    let alpha = rational(n as i64 - 2, 2);
    let pochhammer = |m: u64| (0..m).fold(BigRational::one(), |acc, i| acc * (&alpha + rational(i as i64, 1)));
    let factorial = |m: u64| (1..=m).fold(BigRational::one(), |acc, i| acc * rational(i as i64, 1));
    let two_t = t * rational(2, 1);
    let mut value = BigRational::zero();
    let mut magnitude = BigRational::zero();
    for j in 0..=degree / 2 {
        let power = degree - 2 * j;
        let mut term = pochhammer(degree - j) / (factorial(j) * factorial(power));
        for _ in 0..power {
            term *= &two_t;
        }
        if j % 2 == 1 {
            term = -term;
        }
        magnitude += if term < BigRational::zero() { -term.clone() } else { term.clone() };
        value += term;
    }
    (value, magnitude)
}

#[test]
fn recurrence_matches_exact_expansion() {
    let points = [(-1, 1), (-1, 2), (0, 1), (3, 10), (1, 1)];
    for n in 4..=64u64 {
        for degree in 0..=40u64 {
            let params = GegenbauerParams::new(n, degree).unwrap();
            for &(num, den) in &points {
                let t = rational(num, den);
                let (exact, magnitude) = exact_expansion(n, degree, &t);
                let exact = exact.to_f64().unwrap();
                let got = gegenbauer_eval(params, num as f64 / den as f64).unwrap();
                // relative, with a floor for roots of P_ℓ where no relative bound exists
                let bound = 1e-10 * exact.abs() + 1e-14 * params.value_at_one();
                assert!(
                    (got - exact).abs() <= bound,
                    "n={n} degree={degree} t={num}/{den}: {got} vs {exact}"
                );
                // the floating expansion is accurate relative to its own term size
                let expansion = gegenbauer_expansion(params, num as f64 / den as f64).unwrap();
                let magnitude = magnitude.to_f64().unwrap();
                assert!(
                    (expansion - exact).abs() <= 1e-13 * magnitude.max(1.0),
                    "n={n} degree={degree} t={num}/{den}"
                );
            }
        }
    }
}

#[test]
fn tau_normalizes_the_weight() {
    for k in (2..=1000u64).step_by(37).chain([2, 3, 4, 999, 1000]) {
        // t = sin θ turns (1-t²)^{(k-3)/2} dt into cos^{k-2} θ dθ
        let power = (k - 2) as i32;
        let q = integrate(|th: f64| th.cos().powi(power), -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 1e-14, 1e-14);
        assert!((tau(k).unwrap() * q.value - 1.0).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn threshold_inverts_measure_on_a_grid() {
    for n in [2u64, 3, 5, 10, 64, 300, 1000] {
        for i in 1..20 {
            let target = i as f64 / 20.0;
            let t = band_threshold(n, target).unwrap();
            assert!((band_measure(BandSpec::new(n, t).unwrap()) - target).abs() < 1e-10, "n={n} target={target}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gegenbauer_parity(n in 3u64..200, degree in 0u64..60, t in -1.0f64..=1.0) {
        let params = GegenbauerParams::new(n, degree).unwrap();
        let plus = gegenbauer_eval(params, t).unwrap();
        let minus = gegenbauer_eval(params, -t).unwrap();
        let sign = if degree % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((minus - sign * plus).abs() <= 1e-12 * plus.abs().max(1.0));
    }

    #[test]
    fn gegenbauer_bounded_by_value_at_one(n in 3u64..200, degree in 0u64..60, t in -1.0f64..=1.0) {
        let params = GegenbauerParams::new(n, degree).unwrap();
        let at_one = params.value_at_one();
        prop_assert!(gegenbauer_eval(params, t).unwrap().abs() <= at_one * (1.0 + 1e-12));
    }

    #[test]
    fn log_gamma_recurrence(x in 1e-3f64..500.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn band_round_trip(n in 2u64..2000, target in 0.001f64..0.999) {
        let t = band_threshold(n, target).unwrap();
        prop_assert!((band_measure(BandSpec::new(n, t).unwrap()) - target).abs() < 1e-10);
    }

    #[test]
    fn band_is_decreasing(n in 2u64..500, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m_lo = band_measure(BandSpec::new(n, lo).unwrap());
        let m_hi = band_measure(BandSpec::new(n, hi).unwrap());
        prop_assert!(m_lo >= m_hi - 1e-15);
    }
}
