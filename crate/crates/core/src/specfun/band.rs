use crate::error::{Error, Result};

use super::gamma::tau;
use super::quadrature::integrate;

/// The symmetric band `{x ∈ S^{n-1} : |x_1| >= T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    n: u64,
    threshold: f64,
}

impl BandSpec {
    pub fn new(n: u64, threshold: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("band needs n >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::domain(format!("band threshold must lie in [0, 1], got {threshold}")));
        }
        Ok(Self { n, threshold })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

const BAND_TOL: f64 = 1e-15;

/// Normalized surface measure `σ_{n-1}(|x_1| >= T) = 2 τ_n ∫_T^1 (1-t²)^{(n-3)/2} dt`.
pub fn band_measure(spec: BandSpec) -> f64 {
    let BandSpec { n, threshold } = spec;
    if threshold == 0.0 {
        return 1.0;
    }
    if threshold == 1.0 {
        return 0.0;
    }
    let scale = 2.0 * tau(n).expect("n >= 2");
    let exponent = (n as f64 - 3.0) / 2.0;
    let tol = BAND_TOL / scale;
    let integral = if n < 5 {
        // t = 1 - u²: the integrand becomes 2 u^{n-2} (2-u²)^{(n-3)/2}, smooth at u = 0
        let upper = (1.0 - threshold).sqrt();
        integrate(
            |u: f64| 2.0 * u.powi(n as i32 - 2) * (2.0 - u * u).powf(exponent),
            0.0,
            upper,
            tol,
            0.0,
        )
        .value
    } else {
        integrate(
            |t: f64| (exponent * (-t * t).ln_1p()).exp(),
            threshold,
            1.0,
            tol,
            0.0,
        )
        .value
    };
    (scale * integral).clamp(0.0, 1.0)
}

const MAX_BISECTIONS: usize = 200;

/// Inverts [`band_measure`]: the `T` with `σ_{n-1}(|x_1| >= T) = target`.
///
/// Bisects until the bracket collapses to adjacent floats (or 200 steps).
pub fn band_threshold(n: u64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain(format!("band target must lie in (0, 1), got {target}")));
    }
    if n < 2 {
        return Err(Error::domain(format!("band needs n >= 2, got {n}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if band_measure(BandSpec { n, threshold: mid }) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn measure(n: u64, t: f64) -> f64 {
        band_measure(BandSpec::new(n, t).unwrap())
    }

    #[test]
    fn endpoints() {
        for n in [2, 3, 4, 10, 1000] {
            assert_eq!(measure(n, 0.0), 1.0);
            assert_eq!(measure(n, 1.0), 0.0);
        }
    }

    #[test]
    fn low_dimensional_closed_forms() {
        for t in [0.05, 0.3, 0.77, 0.999] {
            // circle: (2/π) arccos T; S²: 1 - T (Archimedes)
            assert!((measure(2, t) - 2.0 / PI * f64::acos(t)).abs() < 1e-13);
            assert!((measure(3, t) - (1.0 - t)).abs() < 1e-13);
            // S³: 1 - (2/π)(T√(1-T²) + asin T)
            let s3 = 1.0 - 2.0 / PI * (t * (1.0 - t * t).sqrt() + t.asin());
            assert!((measure(4, t) - s3).abs() < 1e-13, "{} {}", measure(4, t), s3);
        }
    }

    #[test]
    fn strictly_decreasing() {
        for n in [4u64, 50, 1000] {
            let mut last = 1.0;
            for i in 1..40 {
                let m = measure(n, i as f64 / 40.0);
                assert!(m <= last);
                last = m;
            }
            assert!(measure(n, 0.2) > measure(n, 0.21));
        }
    }

    #[test]
    fn half_measure_threshold_scales_like_inverse_sqrt_n() {
        let n = 1000u64;
        let t = band_threshold(n, 0.5).unwrap();
        let root = (n as f64).sqrt();
        assert!(t >= 0.5 / root && t <= 1.5 / root, "T = {t}");
        assert!((measure(n, t) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_inverts_measure() {
        for n in [2u64, 3, 4, 7, 100, 1000] {
            for target in [0.01, 0.25, 0.5, 0.75, 0.99] {
                let t = band_threshold(n, target).unwrap();
                assert!((measure(n, t) - target).abs() < 1e-12, "n={n} target={target}");
            }
            assert!(band_threshold(n, 0.25).unwrap() > band_threshold(n, 0.5).unwrap());
        }
        let near_one = band_threshold(50, 1.0 - 1e-12).unwrap();
        assert!(near_one < 1e-10);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(band_threshold(10, 0.0).is_err());
        assert!(band_threshold(10, 1.0).is_err());
        assert!(BandSpec::new(10, 1.2).is_err());
        assert!(BandSpec::new(1, 0.2).is_err());
    }
}
