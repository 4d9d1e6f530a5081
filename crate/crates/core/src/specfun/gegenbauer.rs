use crate::error::{Error, Result};

use super::gamma::{log_binomial, log_factorial, log_pochhammer};

/// Degree and ambient dimension of the zonal Gegenbauer polynomial `P_ℓ`
/// orthogonal for the weight `(1-t²)^{(n-3)/2}` and normalized by
/// `P_ℓ(1) = C(ℓ+n-3, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GegenbauerParams {
    n: u64,
    degree: u64,
}

impl GegenbauerParams {
    pub fn new(n: u64, degree: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("Gegenbauer polynomials need n >= 3, got {n}")));
        }
        Ok(Self { n, degree })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Ultraspherical parameter `α = (n-2)/2`.
    pub fn alpha(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    /// `P_ℓ(1) = C(ℓ+n-3, ℓ)`.
    pub fn value_at_one(&self) -> f64 {
        log_binomial((self.degree + self.n - 3) as f64, self.degree).value()
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("Gegenbauer argument must lie in [-1, 1], got {t}")));
    }
    Ok(())
}

/// `P_ℓ(t) / P_ℓ(1)` by the three-term recurrence of the normalized family,
/// `(2α+j) p_{j+1} = 2(j+α) t p_j - j p_{j-1}`.
///
/// The normalized values stay bounded by one, so this never overflows.
pub fn gegenbauer_normalized(params: GegenbauerParams, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(normalized_unchecked(params.alpha(), params.degree, t))
}

pub(crate) fn normalized_unchecked(alpha: f64, degree: u64, t: f64) -> f64 {
    if degree == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for j in 1..degree {
        let jf = j as f64;
        let next = (2.0 * (jf + alpha) * t * cur - jf * prev) / (2.0 * alpha + jf);
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_ℓ(t)` in the normalization `P_ℓ(1) = C(ℓ+n-3, ℓ)`.
///
/// Overflows to infinity once the binomial exceeds `f64::MAX`; use
/// [`gegenbauer_normalized`] for large degrees or dimensions.
pub fn gegenbauer_eval(params: GegenbauerParams, t: f64) -> Result<f64> {
    Ok(gegenbauer_normalized(params, t)? * params.value_at_one())
}

/// `P_ℓ(t)` from the explicit expansion
/// `Σ_j (-1)^j (α)_{ℓ-j} (2t)^{ℓ-2j} / (j! (ℓ-2j)!)`, summed in log space.
///
/// The sum alternates and loses roughly `log10(Σ|terms| / |P_ℓ(t)|)` digits,
/// so it is only a cross-check for modest degrees.
pub fn gegenbauer_expansion(params: GegenbauerParams, t: f64) -> Result<f64> {
    check_t(t)?;
    let alpha = params.alpha();
    let m = params.degree;
    let mut terms: Vec<(i8, f64)> = Vec::with_capacity(m as usize / 2 + 1);
    for j in 0..=m / 2 {
        let power = m - 2 * j;
        let mut sign: i8 = if j % 2 == 0 { 1 } else { -1 };
        let ln_power = if power == 0 {
            0.0
        } else if t == 0.0 {
            continue;
        } else {
            if t < 0.0 && power % 2 == 1 {
                sign = -sign;
            }
            power as f64 * (2.0 * t.abs()).ln()
        };
        let poch = log_pochhammer(alpha, m - j);
        let ln = poch.ln_abs - log_factorial(j) - log_factorial(power) + ln_power;
        terms.push((sign * poch.sign, ln));
    }
    let Some(max) = terms.iter().map(|(_, l)| *l).reduce(f64::max) else {
        return Ok(0.0);
    };
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (s, l) in terms {
        let v = f64::from(s) * (l - max).exp();
        let t = sum + v;
        if f64::abs(sum) >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    Ok((sum + comp) * max.exp())
}
