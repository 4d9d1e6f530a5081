use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// zeta(2), zeta(3), ..., zeta(30)
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

// Lanczos coefficients for g = 671/128, 14 terms.
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `ln Γ(1 + z)` for `|z| <= 0.25` from the Taylor series
/// `-γ z + Σ_{k≥2} (-1)^k ζ(k) z^k / k`.
fn log_gamma_1p(z: f64) -> f64 {
    let mut sum = -EULER_GAMMA * z;
    let mut power = -z;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        power *= -z;
        sum += zeta * power / k;
    }
    sum
}

fn log_gamma_lanczos(x: f64) -> f64 {
    let tmp = x + 5.242_187_5;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Uses a 14-term Lanczos sum away from the roots at 1 and 2 and a zeta
/// series next to them, so the relative error stays near machine precision
/// across `(0, 1e6]`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let z1 = x - 1.0;
    if z1.abs() <= 0.25 {
        return Ok(log_gamma_1p(z1));
    }
    let z2 = x - 2.0;
    if z2.abs() <= 0.25 {
        return Ok(z2.ln_1p() + log_gamma_1p(z2));
    }
    Ok(log_gamma_lanczos(x))
}

/// A real number stored as `sign * exp(ln_abs)`; `sign == 0` is an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { sign: 1, ln_abs: 0.0 };
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_abs.exp(),
        }
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn div(self, other: SignedLog) -> SignedLog {
        debug_assert!(!other.is_zero(), "division by exact zero");
        if self.is_zero() {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs - other.ln_abs,
        }
    }
}

// Beyond this many factors the rising factorial switches to a log-gamma
// difference for its positive tail.
const DIRECT_POCHHAMMER_LIMIT: u64 = 1 << 14;

/// Rising factorial `(a)_m = a (a+1) ... (a+m-1)` as a signed logarithm.
///
/// `m = 0` gives one; a zero factor gives [`SignedLog::ZERO`].
pub fn log_pochhammer(a: f64, m: u64) -> SignedLog {
    let mut sign: i8 = 1;
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut push = |v: f64| {
        // Neumaier summation of the log factors
        let t = acc + v;
        if acc.abs() >= v.abs() {
            comp += (acc - t) + v;
        } else {
            comp += (v - t) + acc;
        }
        acc = t;
    };
    let mut i = 0u64;
    while i < m {
        let factor = a + i as f64;
        if factor > 0.0 && m - i > DIRECT_POCHHAMMER_LIMIT {
            // (factor)_{m-i} for a positive base
            let rest = m - i;
            let lg = log_gamma(factor + rest as f64).expect("positive argument")
                - log_gamma(factor).expect("positive argument");
            push(lg);
            break;
        }
        if factor == 0.0 {
            return SignedLog::ZERO;
        }
        if factor < 0.0 {
            sign = -sign;
        }
        push(factor.abs().ln());
        i += 1;
    }
    SignedLog {
        sign,
        ln_abs: acc + comp,
    }
}

/// `ln m!`.
pub fn log_factorial(m: u64) -> f64 {
    log_pochhammer(1.0, m).ln_abs
}

/// Generalized binomial `C(x, m) = x (x-1) ... (x-m+1) / m!` with real top.
pub fn log_binomial(x: f64, m: u64) -> SignedLog {
    let falling = log_pochhammer(x - m as f64 + 1.0, m);
    if falling.is_zero() {
        return SignedLog::ZERO;
    }
    SignedLog {
        sign: falling.sign,
        ln_abs: falling.ln_abs - log_factorial(m),
    }
}

/// The sphere slicing constant `τ_k = Γ(k/2) / (√π Γ(k/2 - 1/2))`, which
/// normalizes the weight `(1-t²)^{(k-3)/2}` on `[-1, 1]`.
pub fn tau(k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain(format!("tau requires k >= 2, got {k}")));
    }
    let half = k as f64 / 2.0;
    let ln = log_gamma(half)? - log_gamma(half - 0.5)?;
    Ok(ln.exp() / PI.sqrt())
}
