//! The discrete Radon transform over `(Z/pZ)^n`.
//!
//! Points are stored by their lexicographic index `Σ x_i p^{n-1-i}`. The
//! transform averages a function over the `p` points of an arithmetic
//! progression `(a; b) = {a + jb}` with `b ≠ 0`, and `S = R*R`.

use num_rational::Ratio;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{proportion_std_error, sample_chunked};
use crate::report::{rows_csv, Emit};

/// Default limit on `p^n (p^n - 1)`, the number of progressions.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

const MAX_POINTS: u64 = 1 << 40;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusConfig {
    p: u64,
    n: u32,
    size: u64,
    budget: u64,
}

impl TorusConfig {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        Self::with_budget(p, n, DEFAULT_BUDGET)
    }

    pub fn with_budget(p: u64, n: u32, budget: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::config(format!("p must be an odd prime, got {p}")));
        }
        if n == 0 {
            return Err(Error::config("torus dimension must be >= 1"));
        }
        let size = p
            .checked_pow(n)
            .filter(|&s| s <= MAX_POINTS)
            .ok_or_else(|| Error::config(format!("p^n = {p}^{n} exceeds the supported size")))?;
        Ok(TorusConfig { p, n, size, budget })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `|G_p| = p^n (p^n - 1)`
    pub fn progression_count(&self) -> u64 {
        self.size.saturating_mul(self.size - 1)
    }

    fn check_budget(&self, what: &str) -> Result<()> {
        if self.progression_count() > self.budget {
            return Err(Error::config(format!(
                "{what} needs {} progressions, over the budget of {}",
                self.progression_count(),
                self.budget
            )));
        }
        Ok(())
    }

    pub fn coords(&self, mut index: u64) -> Vec<u64> {
        let mut c = vec![0; self.n as usize];
        for slot in c.iter_mut().rev() {
            *slot = index % self.p;
            index /= self.p;
        }
        c
    }

    pub fn index(&self, coords: &[u64]) -> u64 {
        coords.iter().fold(0, |acc, &c| acc * self.p + c)
    }

    /// `(p^{n-1} - 1)/(p^n - 1)`, the eigenvalue of `S` on mean-zero functions.
    pub fn lambda_sq(&self) -> Ratio<i64> {
        let size = self.size as i64;
        Ratio::new(size / self.p as i64 - 1, size - 1)
    }
}

/// The progression `(a; b)` with `b ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl Progression {
    pub fn new(cfg: &TorusConfig, a: Vec<u64>, b: Vec<u64>) -> Result<Self> {
        let n = cfg.n as usize;
        if a.len() != n || b.len() != n {
            return Err(Error::domain(format!("progression coordinates must have length {n}")));
        }
        if a.iter().chain(&b).any(|&c| c >= cfg.p) {
            return Err(Error::domain(format!("coordinates must lie in 0..{}", cfg.p)));
        }
        if b.iter().all(|&c| c == 0) {
            return Err(Error::domain("progression step b must be nonzero"));
        }
        Ok(Progression { a, b })
    }

    pub fn from_indices(cfg: &TorusConfig, a: u64, b: u64) -> Result<Self> {
        Self::new(cfg, cfg.coords(a), cfg.coords(b))
    }

    /// Indices of `a + jb` for `j = 0..p`.
    pub fn points(&self, cfg: &TorusConfig) -> Vec<u64> {
        let p = cfg.p;
        let mut x = self.a.clone();
        let mut out = Vec::with_capacity(p as usize);
        for _ in 0..p {
            out.push(cfg.index(&x));
            for (xi, bi) in x.iter_mut().zip(&self.b) {
                *xi = (*xi + bi) % p;
            }
        }
        out
    }
}

/// Dense real function on `(Z/pZ)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    cfg: TorusConfig,
    values: Vec<f64>,
}

impl TorusFunction {
    pub fn new(cfg: TorusConfig, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != cfg.size {
            return Err(Error::domain(format!("expected {} values, got {}", cfg.size, values.len())));
        }
        Ok(TorusFunction { cfg, values })
    }

    pub fn from_fn(cfg: TorusConfig, f: impl Fn(&[u64]) -> f64) -> Self {
        let values = (0..cfg.size).map(|i| f(&cfg.coords(i))).collect();
        TorusFunction { cfg, values }
    }

    pub fn constant(cfg: TorusConfig, c: f64) -> Self {
        TorusFunction {
            cfg,
            values: vec![c; cfg.size as usize],
        }
    }

    /// Real and imaginary parts of `x ↦ e^{2πi⟨x,y⟩/p}`.
    pub fn character(cfg: TorusConfig, y: &[u64]) -> (Self, Self) {
        let p = cfg.p;
        let phase = |x: &[u64]| {
            let e = x.iter().zip(y).fold(0, |acc, (a, b)| (acc + a * b) % p);
            2.0 * std::f64::consts::PI * e as f64 / p as f64
        };
        (
            Self::from_fn(cfg, |x| phase(x).cos()),
            Self::from_fn(cfg, |x| phase(x).sin()),
        )
    }

    pub fn config(&self) -> TorusConfig {
        self.cfg
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(1/p^n) Σ f g`
    pub fn inner(&self, other: &TorusFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() / self.values.len() as f64
    }
}

/// `(Rf)(a; b) = (1/p) Σ_j f(a + jb)`.
pub fn radon_ap(f: &TorusFunction, prog: &Progression) -> f64 {
    let pts = prog.points(&f.cfg);
    pts.iter().map(|&i| f.values[i as usize]).sum::<f64>() / f.cfg.p as f64
}

/// A function on `G_p`, indexed by `a · (p^n - 1) + (b - 1)` with `b` the
/// (nonzero) index of the step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionFunction {
    cfg: TorusConfig,
    values: Vec<f64>,
}

impl ProgressionFunction {
    pub fn from_fn(cfg: TorusConfig, mut f: impl FnMut(u64, u64) -> f64) -> Result<Self> {
        cfg.check_budget("a function on progressions")?;
        let mut values = Vec::with_capacity(cfg.progression_count() as usize);
        for a in 0..cfg.size {
            for b in 1..cfg.size {
                values.push(f(a, b));
            }
        }
        Ok(ProgressionFunction { cfg, values })
    }

    pub fn get(&self, a: u64, b: u64) -> f64 {
        self.values[(a * (self.cfg.size - 1) + b - 1) as usize]
    }

    /// Averages over the orbit: `g̃(a; b) = (1/p) Σ_j g(a + jb; b)`.
    pub fn symmetrize(&self) -> Self {
        let cfg = self.cfg;
        let values = (0..cfg.size)
            .flat_map(|a| (1..cfg.size).map(move |b| (a, b)))
            .map(|(a, b)| {
                let prog = Progression::from_indices(&cfg, a, b).expect("b != 0");
                prog.points(&cfg).iter().map(|&x| self.get(x, b)).sum::<f64>() / cfg.p as f64
            })
            .collect();
        ProgressionFunction { cfg, values }
    }

    /// Mean of `self · other` over `G_p`.
    pub fn inner(&self, other: &ProgressionFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() / self.values.len() as f64
    }
}

/// `Rf` as a function on `G_p`.
pub fn radon_transform(f: &TorusFunction) -> Result<ProgressionFunction> {
    let cfg = f.cfg;
    ProgressionFunction::from_fn(cfg, |a, b| {
        radon_ap(f, &Progression::from_indices(&cfg, a, b).expect("b != 0"))
    })
}

/// `(R*g)(a) = (1/(p^n - 1)) Σ_{b≠0} g(a; b)`.
///
/// This is the adjoint of `R` on functions that are constant along each
/// progression, which includes the range of `R`.
pub fn radon_conjugate(g: &ProgressionFunction) -> TorusFunction {
    let cfg = g.cfg;
    let values = (0..cfg.size)
        .map(|a| (1..cfg.size).map(|b| g.get(a, b)).sum::<f64>() / (cfg.size - 1) as f64)
        .collect();
    TorusFunction { cfg, values }
}

/// `(Sf)(a) = (1/(p(p^n - 1))) Σ_{b≠0} Σ_j f(a + jb)` by brute force.
pub fn apply_s(f: &TorusFunction) -> Result<TorusFunction> {
    let cfg = f.cfg;
    cfg.check_budget("apply_s")?;
    let norm = (cfg.p * (cfg.size - 1)) as f64;
    let values = (0..cfg.size)
        .into_par_iter()
        .map(|a| {
            (1..cfg.size)
                .map(|b| {
                    let prog = Progression::from_indices(&cfg, a, b).expect("b != 0");
                    prog.points(&cfg).iter().map(|&x| f.values[x as usize]).sum::<f64>()
                })
                .sum::<f64>()
                / norm
        })
        .collect();
    Ok(TorusFunction { cfg, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMode {
    Float,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub y: Vec<u64>,
    pub ratio: f64,
    /// `(numerator, denominator)` in exact mode.
    pub exact: Option<(i64, i64)>,
    pub expected: f64,
    /// `max_a |Sf(a) - ratio f(a)|` in float mode, 0 in exact mode.
    pub residual: f64,
}

impl Emit for Vec<EigenRow> {
    fn to_csv(&self) -> Result<String> {
        let rows: Vec<(String, f64, f64, f64)> = self
            .iter()
            .map(|r| {
                let y = r.y.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                (y, r.ratio, r.expected, r.residual)
            })
            .collect();
        rows_csv(&["y", "ratio", "expected", "residual"], &rows)
    }
}

// Exact S f_y (a) for the character f_y: counts of ⟨a + jb, y⟩ = e over all
// (b ≠ 0, j) give Sf_y(a) = Σ_e v[e] ω^e / (p(p^n-1)). Since the only linear
// relation among 1, ω, …, ω^{p-1} is their vanishing sum, this equals
// L ω^{⟨a,y⟩} iff v[e] is constant off e0 = ⟨a,y⟩, and then L = v[e0] - v_other.
fn exact_eigenvalue(cfg: &TorusConfig, y: &[u64]) -> Result<Ratio<i64>> {
    let p = cfg.p;
    let dot = |x: &[u64]| x.iter().zip(y).fold(0, |acc, (a, b)| (acc + a * b) % p);
    let mut eigen: Option<Ratio<i64>> = None;
    for a in 0..cfg.size {
        let mut counts = vec![0i64; p as usize];
        for b in 1..cfg.size {
            let prog = Progression::from_indices(cfg, a, b).expect("b != 0");
            for x in prog.points(cfg) {
                counts[dot(&cfg.coords(x)) as usize] += 1;
            }
        }
        let e0 = dot(&cfg.coords(a)) as usize;
        let others: Vec<i64> = (0..p as usize).filter(|&e| e != e0).map(|e| counts[e]).collect();
        if others.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Numeric(format!("character {y:?} is not an eigenfunction at a={a}")));
        }
        let l = counts[e0] - others[0];
        let ratio = Ratio::new(l, (p * (cfg.size - 1)) as i64);
        match eigen {
            Some(prev) if prev != ratio => {
                return Err(Error::Numeric(format!("character {y:?} has non-constant ratio")));
            }
            _ => eigen = Some(ratio),
        }
    }
    Ok(eigen.expect("size >= 1"))
}

/// Applies `S` to every character and reports the eigenvalue ratio.
pub fn eigen_check(cfg: &TorusConfig, mode: EigenMode) -> Result<Vec<EigenRow>> {
    cfg.check_budget("eigen_check")?;
    let lambda = cfg.lambda_sq();
    let expected_of = |y: &[u64]| {
        if y.iter().all(|&c| c == 0) {
            Ratio::from_integer(1)
        } else {
            lambda
        }
    };
    let mut rows = Vec::with_capacity(cfg.size as usize);
    for yi in 0..cfg.size {
        let y = cfg.coords(yi);
        let expected = expected_of(&y);
        let expected_f = *expected.numer() as f64 / *expected.denom() as f64;
        let row = match mode {
            EigenMode::Exact => {
                let r = exact_eigenvalue(cfg, &y)?;
                EigenRow {
                    ratio: *r.numer() as f64 / *r.denom() as f64,
                    exact: Some((*r.numer(), *r.denom())),
                    expected: expected_f,
                    residual: 0.0,
                    y,
                }
            }
            EigenMode::Float => {
                let (re, im) = TorusFunction::character(*cfg, &y);
                let (sre, sim) = (apply_s(&re)?, apply_s(&im)?);
                // Rayleigh quotient ⟨Sf, f⟩ / ⟨f, f⟩ with f = re + i·im
                let num = sre.inner(&re) + sim.inner(&im);
                let den = re.inner(&re) + im.inner(&im);
                let ratio = num / den;
                let residual = (0..cfg.size as usize)
                    .map(|i| {
                        (sre.values[i] - ratio * re.values[i]).hypot(sim.values[i] - ratio * im.values[i])
                    })
                    .fold(0.0, f64::max);
                EigenRow {
                    ratio,
                    exact: None,
                    expected: expected_f,
                    residual,
                    y,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Subset of `(Z/pZ)^n` stored as a bitset over lexicographic indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSet {
    words: Vec<u64>,
    len: u64,
}

impl TorusSet {
    pub fn from_indices(cfg: &TorusConfig, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut words = vec![0u64; cfg.size.div_ceil(64) as usize];
        let mut len = 0;
        for i in indices {
            if i >= cfg.size {
                return Err(Error::domain(format!("index {i} outside the torus of size {}", cfg.size)));
            }
            let (w, bit) = ((i / 64) as usize, 1u64 << (i % 64));
            if words[w] & bit == 0 {
                words[w] |= bit;
                len += 1;
            }
        }
        Ok(TorusSet { words, len })
    }

    /// A uniformly random subset of size `⌊p^n / 2⌋`.
    pub fn random_half(cfg: &TorusConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chosen = sample_indices(&mut rng, cfg.size as usize, (cfg.size / 2) as usize);
        Self::from_indices(cfg, chosen.into_iter().map(|i| i as u64)).expect("indices in range")
    }

    pub fn contains(&self, i: u64) -> bool {
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TorusMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusReport {
    pub p: u64,
    pub n: u32,
    pub mode: String,
    pub seed: Option<u64>,
    pub progressions: u64,
    pub set_size: u64,
    /// `√(p/2)`
    pub threshold: f64,
    /// Fraction of progressions with `|#(A ∩ L) - p/2| >= √(p/2)`.
    pub probability: f64,
    pub std_error: f64,
    pub literal_bound: f64,
    pub lambda_sq: f64,
    /// Mean of `(#(A ∩ L)/p - m)²` with `m = |A|/p^n`.
    pub variance: f64,
    /// `λ² m (1 - m)`
    pub predicted_variance: f64,
    /// Chebyshev bound `λ² m (1-m) p² / (p/2)` for deviations from `p m`.
    pub chebyshev_bound: f64,
}

impl Emit for TorusReport {
    fn to_csv(&self) -> Result<String> {
        rows_csv(
            &[
                "p",
                "n",
                "mode",
                "progressions",
                "set_size",
                "threshold",
                "probability",
                "std_error",
                "variance",
                "predicted_variance",
                "chebyshev_bound",
            ],
            &[(
                self.p,
                self.n,
                &self.mode,
                self.progressions,
                self.set_size,
                self.threshold,
                self.probability,
                self.std_error,
                self.variance,
                self.predicted_variance,
                self.chebyshev_bound,
            )],
        )
    }
}

fn hits(cfg: &TorusConfig, set: &TorusSet, a: &[u64], b: &[u64]) -> u64 {
    let p = cfg.p;
    let mut x = a.to_vec();
    let mut count = 0;
    for _ in 0..p {
        count += u64::from(set.contains(cfg.index(&x)));
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi = (*xi + bi) % p;
        }
    }
    count
}

/// Probability that a uniform progression `(a; b)` meets `A` in a number of
/// points deviating from `p/2` by at least `√(p/2)`.
pub fn run_torus_experiment(cfg: &TorusConfig, set: &TorusSet, mode: TorusMode) -> Result<TorusReport> {
    if set.len() != cfg.size / 2 {
        return Err(Error::Precondition(format!(
            "set must have ⌊p^n/2⌋ = {} points, has {}",
            cfg.size / 2,
            set.len()
        )));
    }
    let p = cfg.p;
    let half = p as f64 / 2.0;
    let threshold = half.sqrt();
    let deviates = |h: u64| (h as f64 - half).abs() >= threshold;
    // p^n · #(A ∩ L) - p |A| is an integer; its square sums exactly
    let centered = |h: u64| (cfg.size * h) as i128 - (p * set.len()) as i128;

    let (events, square_sum, total, seed) = match mode {
        TorusMode::Exhaustive => {
            cfg.check_budget("exhaustive sweep")?;
            let (events, squares) = (1..cfg.size)
                .into_par_iter()
                .map(|b| {
                    let bc = cfg.coords(b);
                    let mut events = 0u64;
                    let mut squares = 0i128;
                    for a in 0..cfg.size {
                        let h = hits(cfg, set, &cfg.coords(a), &bc);
                        events += u64::from(deviates(h));
                        squares += centered(h).pow(2);
                    }
                    (events, squares)
                })
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            (events, squares, cfg.progression_count(), None)
        }
        TorusMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::config("sampled mode needs count >= 1"));
            }
            let draws = sample_chunked(count as usize, seed, |rng| {
                let a = rng.random_range(0..cfg.size);
                let b = rng.random_range(1..cfg.size);
                hits(cfg, set, &cfg.coords(a), &cfg.coords(b))
            });
            let events = draws.iter().filter(|&&h| deviates(h)).count() as u64;
            let squares = draws.iter().map(|&h| centered(h).pow(2)).sum();
            (events, squares, count, Some(seed))
        }
    };
    let probability = events as f64 / total as f64;
    let scale = (cfg.size as f64 * p as f64).powi(2);
    let variance = square_sum as f64 / total as f64 / scale;
    let m = set.len() as f64 / cfg.size as f64;
    let lambda = cfg.lambda_sq();
    let lambda_sq = *lambda.numer() as f64 / *lambda.denom() as f64;
    let predicted_variance = lambda_sq * m * (1.0 - m);
    Ok(TorusReport {
        p,
        n: cfg.n,
        mode: match mode {
            TorusMode::Exhaustive => "exhaustive".into(),
            TorusMode::Sampled { .. } => "sampled".into(),
        },
        seed,
        progressions: total,
        set_size: set.len(),
        threshold,
        probability,
        std_error: match mode {
            TorusMode::Exhaustive => 0.0,
            TorusMode::Sampled { .. } => proportion_std_error(probability, total as usize),
        },
        literal_bound: 0.5,
        lambda_sq,
        variance,
        predicted_variance,
        chebyshev_bound: predicted_variance * (p as f64).powi(2) / half,
    })
}
