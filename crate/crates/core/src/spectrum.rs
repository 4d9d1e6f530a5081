//! Eigenvalues `λ²_{k,ℓ}` of `S_k = R_k* R_k`, where `R_k` averages a function
//! on `S^{n-1}` over great subspheres of dimension `k`.
//!
//! Spherical harmonics of degree `ℓ` form the eigenspaces. Odd degrees are
//! annihilated, so most entry points take the *half degree* `ℓ` and return
//! the eigenvalue on harmonics of degree `2ℓ`.
//!
//! Two independent routes are provided: [`eigenvalue_quadrature`] integrates
//! the normalized Gegenbauer polynomial against the `k`-dimensional slice
//! weight, while [`eigenvalue_general`] evaluates the closed Γ-product.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gegenbauer::normalized_unchecked;
use crate::specfun::quadrature::integrate;
use crate::specfun::{log_binomial, log_factorial, log_pochhammer, tau, SignedLog};

/// Largest half degree accepted by tables.
pub const MAX_HALF_DEGREE: u64 = 10_000;

/// `(n, k, degree)` indexing the eigenvalue of `S_k` on degree-`degree`
/// harmonics of `S^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectrumQuery {
    n: u64,
    k: u64,
    degree: u64,
}

impl SpectrumQuery {
    pub fn new(n: u64, k: u64, degree: u64) -> Result<Self> {
        check_nk(n, k)?;
        Ok(Self { n, k, degree })
    }

    /// Query for harmonic degree `2 * half_degree`.
    pub fn even(n: u64, k: u64, half_degree: u64) -> Result<Self> {
        Self::new(n, k, 2 * half_degree)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("ambient dimension must be >= 3, got n={n}")));
    }
    if k < 2 || k >= n {
        return Err(Error::domain(format!("subspace dimension must satisfy 2 <= k <= n-1, got k={k}, n={n}")));
    }
    Ok(())
}

/// Half degree `ℓ` for the correlation eigenvalue `η_{2ℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationQuery {
    n: u64,
    half_degree: u64,
}

impl CorrelationQuery {
    pub fn new(n: u64, half_degree: u64) -> Result<Self> {
        if n < 4 {
            return Err(Error::domain(format!("correlation eigenvalues need n >= 4, got {n}")));
        }
        Ok(Self { n, half_degree })
    }
}

// Above this cancellation ratio the floating quadrature is replaced by exact
// rational moments.
const MAX_QUADRATURE_CANCELLATION: f64 = 1e4;

/// `λ²_{k,ℓ} = τ_k ∫_{-1}^{1} P_ℓ(t) (1-t²)^{(k-3)/2} dt / P_ℓ(1)`.
///
/// Integrated in `t = cos θ`, which turns the weight into `sin^{k-2} θ` and
/// removes the endpoint singularity at `k = 2`. When the integrand cancels
/// too strongly for double precision (large `k` and degree), the same
/// integral is evaluated exactly term by term through its polynomial moments.
pub fn eigenvalue_quadrature(q: SpectrumQuery) -> f64 {
    let SpectrumQuery { n, k, degree } = q;
    let alpha = (n as f64 - 2.0) / 2.0;
    let power = (k - 2) as i32;
    // folded onto [0, π/2]; p(t) + p(-t) vanishes identically for odd degrees
    let integrand = |theta: f64| {
        let c = theta.cos();
        let even = normalized_unchecked(alpha, degree, c) + normalized_unchecked(alpha, degree, -c);
        even * theta.sin().powi(power)
    };
    let quad = integrate(integrand, 0.0, std::f64::consts::FRAC_PI_2, 0.0, 1e-14);
    let tau_k = tau(k).expect("k >= 2");
    let value = tau_k * quad.value;
    if value == 0.0 {
        return 0.0;
    }
    let cancellation = tau_k * quad.abs_value / value.abs();
    if cancellation > MAX_QUADRATURE_CANCELLATION {
        return eigenvalue_moments(q).to_f64().unwrap_or(0.0);
    }
    value
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn binomial_int(top: u64, m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..m {
        acc = acc * BigInt::from(top - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact value of the quadrature integral through the monomial expansion of
/// `P_ℓ` and the moments `τ_k ∫ t^{2i} (1-t²)^{(k-3)/2} dt = (1/2)_i / (k/2)_i`.
pub fn eigenvalue_moments(q: SpectrumQuery) -> BigRational {
    let SpectrumQuery { n, k, degree: m } = q;
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let alpha = rational(n as i64 - 2, 2);
    let half = rational(1, 2);
    let half_k = rational(k as i64, 2);
    // moments[i] = (1/2)_i / (k/2)_i
    let mut moments = Vec::with_capacity(m as usize / 2 + 1);
    let mut mom = BigRational::one();
    for i in 0..=m / 2 {
        moments.push(mom.clone());
        let ib = BigRational::from_integer(BigInt::from(i));
        mom = mom * (&half + &ib) / (&half_k + &ib);
    }
    // (α)_r for r = 0..=m
    let mut poch = Vec::with_capacity(m as usize + 1);
    let mut acc = BigRational::one();
    for r in 0..=m {
        poch.push(acc.clone());
        acc = acc * (&alpha + BigRational::from_integer(BigInt::from(r)));
    }
    let mut factorial = vec![BigInt::one(); m as usize + 1];
    for i in 1..=m as usize {
        factorial[i] = &factorial[i - 1] * BigInt::from(i);
    }
    let mut sum = BigRational::zero();
    for j in 0..=m / 2 {
        let power = m - 2 * j;
        let coeff = &poch[(m - j) as usize] * BigRational::from_integer(BigInt::from(2).pow(power as u32))
            / BigRational::from_integer(&factorial[j as usize] * &factorial[power as usize]);
        let term = coeff * &moments[(power / 2) as usize];
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / BigRational::from_integer(binomial_int(m + n - 3, m))
}

/// `λ²_{2,2ℓ} = C(ℓ+n/2-2, ℓ)² / C(2ℓ+n-3, 2ℓ)`; for odd `n` the upper
/// binomial uses the Γ extension.
pub fn eigenvalue_k2(n: u64, half_degree: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain(format!("eigenvalue_k2 needs n >= 4, got {n}")));
    }
    let l = half_degree;
    let top = log_binomial(l as f64 + n as f64 / 2.0 - 2.0, l);
    let bottom = log_binomial((2 * l + n - 3) as f64, 2 * l);
    Ok(top.mul(top).div(bottom).value())
}

/// Closed form of `λ²_{k,2ℓ}` for all `2 <= k <= n-1`, evaluated in log space.
///
/// With `τ_k √π Γ(k/2-1/2) = Γ(k/2)` the Γ-product collapses to
/// `(n/2-1)_ℓ (n/2-k/2)_ℓ / ((k/2)_ℓ ℓ! C(2ℓ+n-3, 2ℓ))`.
/// Odd degrees return zero.
pub fn eigenvalue_general(q: SpectrumQuery) -> f64 {
    let SpectrumQuery { n, k, degree } = q;
    if degree % 2 == 1 {
        return 0.0;
    }
    let l = degree / 2;
    if l == 0 {
        return 1.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    let numerator = log_pochhammer(nf / 2.0 - 1.0, l).mul(log_pochhammer((nf - kf) / 2.0, l));
    let denominator = log_pochhammer(kf / 2.0, l)
        .mul(SignedLog {
            sign: 1,
            ln_abs: log_factorial(l),
        })
        .mul(log_binomial((degree + n - 3) as f64, degree));
    numerator.div(denominator).value()
}

/// `λ²_{k,2ℓ+2} / λ²_{k,2ℓ} = (2ℓ+1)(2ℓ+n-k) / ((2ℓ+k)(2ℓ+n-1))`.
pub fn eigenvalue_ratio(n: u64, k: u64, half_degree: u64) -> Result<f64> {
    check_nk(n, k)?;
    let two_l = 2.0 * half_degree as f64;
    let (nf, kf) = (n as f64, k as f64);
    Ok((two_l + 1.0) * (two_l + nf - kf) / ((two_l + kf) * (two_l + nf - 1.0)))
}

/// `η_{2ℓ} = P_{2ℓ}(0) / P_{2ℓ}(1) = (-1)^ℓ C(ℓ+n/2-2, ℓ) / C(2ℓ+n-3, 2ℓ)`,
/// the eigenvalue of `f ↦ ∫ R_k f(H^⊥)` over subspaces through a point.
pub fn correlation_eigenvalue(q: CorrelationQuery) -> f64 {
    let CorrelationQuery { n, half_degree: l } = q;
    let top = log_binomial(l as f64 + n as f64 / 2.0 - 2.0, l);
    let bottom = log_binomial((2 * l + n - 3) as f64, 2 * l);
    let magnitude = top.div(bottom).value();
    if l % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Upper bound `(n-k)/(k(n-1)) (1/σ(A) - 1)` on `Var(σ_H(A∩H)/σ(A))` for a
/// random `k`-dimensional subspace `H`.
pub fn variance_bound(n: u64, k: u64, measure: f64) -> Result<f64> {
    check_nk(n, k)?;
    if !(measure > 0.0 && measure < 1.0) {
        return Err(Error::domain(format!("set measure must lie in (0, 1), got {measure}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok((nf - kf) / (kf * (nf - 1.0)) * (1.0 / measure - 1.0))
}

fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Both sides of the alternating identity
/// `Σ_j (-1)^j C(b,j) (a+b)! (2b+c-j)! / ((a+b-j)! (2b+c)!) = (b+c)! (c-a+b)! / ((c-a)! (2b+c)!)`
/// in exact arithmetic over the common denominator `(2b+c)!`.
pub fn vandermonde_check(a: u64, b: u64, c: u64) -> Result<(BigRational, BigRational)> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::domain("vandermonde_check needs positive a, b, c"));
    }
    if c < a {
        return Err(Error::domain(format!("vandermonde_check needs c >= a, got a={a}, c={c}")));
    }
    let denominator = factorial(2 * b + c);
    let mut numerator = BigInt::zero();
    let mut choose = BigInt::one();
    for j in 0..=b {
        // (a+b)! / (a+b-j)! is the falling factorial of length j
        let falling = ((a + b - j + 1)..=(a + b)).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
        let term = &choose * falling * factorial(2 * b + c - j);
        if j % 2 == 0 {
            numerator += term;
        } else {
            numerator -= term;
        }
        choose = choose * BigInt::from(b - j) / BigInt::from(j + 1);
    }
    let lhs = BigRational::new(numerator, denominator.clone());
    let rhs = BigRational::new(factorial(b + c) * factorial(c - a + b), factorial(c - a) * denominator);
    debug_assert!(!lhs.is_negative());
    Ok((lhs, rhs))
}

/// One row of an exported spectrum table; `ell` is the half degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: u64,
    pub k: u64,
    pub ell: u64,
    pub lambda_sq: f64,
}

/// `λ²_{k,2ℓ}` for `ℓ = 0..=max_half_degree`, ordered by `ℓ`.
pub fn spectrum_table(n: u64, k: u64, max_half_degree: u64) -> Result<Vec<SpectrumRow>> {
    check_nk(n, k)?;
    if max_half_degree > MAX_HALF_DEGREE {
        return Err(Error::config(format!(
            "lmax must be at most {MAX_HALF_DEGREE}, got {max_half_degree}"
        )));
    }
    Ok((0..=max_half_degree)
        .into_par_iter()
        .map(|ell| SpectrumRow {
            n,
            k,
            ell,
            lambda_sq: eigenvalue_general(SpectrumQuery { n, k, degree: 2 * ell }),
        })
        .collect())
}
