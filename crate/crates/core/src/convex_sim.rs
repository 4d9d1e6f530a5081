//! Random lines through isotropic convex bodies.
//!
//! Three bodies are supported, each already in isotropic position: the ball
//! of radius `√(n+2)`, the cube of side `√12`, and the simplex
//! `{y_i >= 0, Σ y_i <= 1}` centered and whitened with the closed-form
//! Dirichlet covariance. Chords are computed exactly (quadratic solve or
//! halfspace clipping) so the zero-one event is decided by interval
//! arithmetic, never by a tolerance on the ratio.

use std::f64::consts::{E, PI, SQRT_2};
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{moments, proportion_std_error, sample_chunked, Histogram};
use crate::report::{rows_csv, Emit, ExperimentReport};
use crate::specfun::band_threshold;
use crate::sphere_sim::{sample_frame, sample_unit_vector, UnitVector, GEODESIC_TAIL_THRESHOLD};

/// Curve points per ellipse in [`run_ellipse_experiment`].
pub const ELLIPSE_GRID: usize = 512;

const MEMBERSHIP_TOL: f64 = 1e-9;
// seeds the Monte Carlo slab threshold independently of the line samples
const THRESHOLD_SEED_SALT: u64 = 0x5eed_7a11_0c0f_fee5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Ball,
    Cube,
    Simplex,
}

impl BodyKind {
    pub fn name(self) -> &'static str {
        match self {
            BodyKind::Ball => "ball",
            BodyKind::Cube => "cube",
            BodyKind::Simplex => "simplex",
        }
    }
}

impl FromStr for BodyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ball" => Ok(BodyKind::Ball),
            "cube" => Ok(BodyKind::Cube),
            "simplex" => Ok(BodyKind::Simplex),
            other => Err(Error::config(format!("unsupported body kind `{other}` (expected ball, cube or simplex)"))),
        }
    }
}

/// Whitening of the simplex `{y_i >= 0, Σ y_i <= 1}`.
///
/// `x = scale · (v - γ (Σv) 1)` with `v = y - offset · 1`, and the inverse
/// `y = (x - δ (Σx) 1) / scale + offset · 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexMap {
    pub offset: f64,
    pub scale: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SimplexMap {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        let root = (nf + 1.0).sqrt();
        // Dirichlet(1,…,1) covariance is c (I - J/(n+1)) with c = 1/((n+1)(n+2))
        let c = 1.0 / ((nf + 1.0) * (nf + 2.0));
        SimplexMap {
            offset: 1.0 / (nf + 1.0),
            scale: c.sqrt().recip(),
            gamma: (1.0 - root) / nf,
            delta: (1.0 - root.recip()) / nf,
        }
    }

    pub fn to_body(&self, y: &[f64]) -> Vec<f64> {
        let total: f64 = y.iter().map(|v| v - self.offset).sum();
        y.iter()
            .map(|v| self.scale * (v - self.offset - self.gamma * total))
            .collect()
    }

    pub fn to_simplex(&self, x: &[f64]) -> Vec<f64> {
        let total: f64 = x.iter().sum();
        x.iter()
            .map(|v| (v - self.delta * total) / self.scale + self.offset)
            .collect()
    }

    /// The dense matrix of `y ↦ x` (without the translation).
    pub fn whitening_matrix(&self, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.scale * (f64::from(u8::from(i == j)) - self.gamma))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BodyShape {
    Ball { radius: f64 },
    Cube { side: f64 },
    Simplex(SimplexMap),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyDescriptor {
    n: usize,
    shape: BodyShape,
}

/// The isotropic ball, cube or simplex in `R^n`.
pub fn make_isotropic_body(kind: BodyKind, n: usize) -> Result<BodyDescriptor> {
    if n < 2 {
        return Err(Error::config(format!("bodies need n >= 2, got {n}")));
    }
    let shape = match kind {
        BodyKind::Ball => BodyShape::Ball {
            radius: (n as f64 + 2.0).sqrt(),
        },
        BodyKind::Cube => BodyShape::Cube { side: 12f64.sqrt() },
        BodyKind::Simplex => BodyShape::Simplex(SimplexMap::new(n)),
    };
    Ok(BodyDescriptor { n, shape })
}

impl BodyDescriptor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> BodyShape {
        self.shape
    }

    pub fn kind(&self) -> BodyKind {
        match self.shape {
            BodyShape::Ball { .. } => BodyKind::Ball,
            BodyShape::Cube { .. } => BodyKind::Cube,
            BodyShape::Simplex(_) => BodyKind::Simplex,
        }
    }

    /// Signed violation of the body's constraints, in body units; `<= 0`
    /// inside, `0` on the boundary.
    pub fn membership_residual(&self, x: &[f64]) -> f64 {
        match self.shape {
            BodyShape::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>().sqrt() - radius,
            BodyShape::Cube { side } => x.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.abs())) - 0.5 * side,
            BodyShape::Simplex(map) => {
                let y = map.to_simplex(x);
                let lowest = y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
                let total: f64 = y.iter().sum();
                map.scale * (-lowest).max(total - 1.0)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && self.membership_residual(x) <= MEMBERSHIP_TOL
    }

    /// Largest chord length.
    pub fn diameter(&self) -> f64 {
        match self.shape {
            BodyShape::Ball { radius } => 2.0 * radius,
            BodyShape::Cube { side } => side * (self.n as f64).sqrt(),
            // vertices e_i are at distance √2 in y-space; whitening scales edges by `scale`
            BodyShape::Simplex(map) => map.scale * SQRT_2,
        }
    }
}

/// Uniform point of the body.
pub fn sample_point<R: Rng + ?Sized>(body: &BodyDescriptor, rng: &mut R) -> Vec<f64> {
    let n = body.n;
    match body.shape {
        BodyShape::Ball { radius } => {
            let dir = sample_unit_vector(n, rng).expect("n >= 2").into_inner();
            let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
            dir.into_iter().map(|v| r * v).collect()
        }
        BodyShape::Cube { side } => (0..n).map(|_| side * (rng.random::<f64>() - 0.5)).collect(),
        BodyShape::Simplex(map) => map.to_body(&sample_simplex_raw(n, rng)),
    }
}

/// Uniform point of `{y_i >= 0, Σ y_i <= 1}` from `n+1` normalized exponentials.
pub fn sample_simplex_raw<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e[1..].iter().map(|v| v / total).collect()
}

/// Hit-and-run line `point + R·direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample {
    pub point: Vec<f64>,
    pub direction: UnitVector,
}

pub fn sample_line<R: Rng + ?Sized>(body: &BodyDescriptor, rng: &mut R) -> LineSample {
    let point = sample_point(body, rng);
    let direction = sample_unit_vector(body.n, rng).expect("n >= 2");
    LineSample { point, direction }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub t_minus: f64,
    pub t_plus: f64,
}

impl Chord {
    pub fn length(&self) -> f64 {
        self.t_plus - self.t_minus
    }
}

// Intersects [lo, hi] with {t : g + t h >= 0}.
fn clip(lo: &mut f64, hi: &mut f64, g: f64, h: f64) {
    if h > 0.0 {
        *lo = lo.max(-g / h);
    } else if h < 0.0 {
        *hi = hi.min(-g / h);
    }
}

/// Exact intersection of the line with the body.
pub fn chord(body: &BodyDescriptor, line: &LineSample) -> Result<Chord> {
    let p = &line.point;
    let d = line.direction.coords();
    if p.len() != body.n || d.len() != body.n {
        return Err(Error::Precondition(format!("line lives in R^{} but body in R^{}", p.len(), body.n)));
    }
    let residual = body.membership_residual(p);
    if residual > MEMBERSHIP_TOL {
        return Err(Error::Precondition(format!("line point lies outside the body (residual {residual:e})")));
    }
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    match body.shape {
        BodyShape::Ball { radius } => {
            let b: f64 = p.iter().zip(d).map(|(x, y)| x * y).sum();
            let pp: f64 = p.iter().map(|x| x * x).sum();
            let disc = (b * b + (radius * radius - pp)).max(0.0).sqrt();
            // root pairing that avoids cancellation
            let q = -b - b.signum() * disc;
            let (r1, r2) = if q == 0.0 {
                (-disc, disc)
            } else {
                (q, (pp - radius * radius) / q)
            };
            lo = r1.min(r2);
            hi = r1.max(r2);
        }
        BodyShape::Cube { side } => {
            let h = 0.5 * side;
            for (&x, &v) in p.iter().zip(d) {
                clip(&mut lo, &mut hi, h - x, -v);
                clip(&mut lo, &mut hi, h + x, v);
            }
        }
        BodyShape::Simplex(map) => {
            let y = map.to_simplex(p);
            let dsum: f64 = d.iter().sum();
            let dy: Vec<f64> = d.iter().map(|v| (v - map.delta * dsum) / map.scale).collect();
            for (&g, &h) in y.iter().zip(&dy) {
                clip(&mut lo, &mut hi, g, h);
            }
            clip(&mut lo, &mut hi, 1.0 - y.iter().sum::<f64>(), -dy.iter().sum::<f64>());
        }
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Numeric("chord clipping produced an empty or unbounded interval".into()));
    }
    Ok(Chord {
        t_minus: lo.min(0.0),
        t_plus: hi.max(0.0),
    })
}

/// Half-volume slab `A_ξ = {x ∈ K : |⟨x, ξ⟩| >= t_ξ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabSet {
    pub xi: Vec<f64>,
    pub threshold: f64,
    /// Whether `threshold` is exact rather than a Monte Carlo estimate.
    pub exact: bool,
}

fn axis_index(xi: &[f64]) -> Option<usize> {
    let mut hit = None;
    for (i, &v) in xi.iter().enumerate() {
        if v.abs() == 1.0 && hit.is_none() {
            hit = Some(i);
        } else if v != 0.0 {
            return None;
        }
    }
    hit
}

/// Threshold `t_ξ` with `vol(A_ξ)/vol(K) = 1/2`.
///
/// Cube along an axis: `s/4`. Ball: the marginal of `⟨x, ξ⟩/R` is that of
/// one coordinate of `S^{n+1}`, so `t = R · band_threshold(n+2, 1/2)`.
/// Otherwise the median of `|⟨X, ξ⟩|` over `⌈(2/tolerance)²⌉` seeded samples,
/// which solves the empirical half-volume equation exactly.
pub fn slab_threshold(body: &BodyDescriptor, xi: &[f64], tolerance: f64, seed: u64) -> Result<SlabSet> {
    if xi.len() != body.n {
        return Err(Error::config(format!("ξ has {} coordinates, body has n={}", xi.len(), body.n)));
    }
    let xi = UnitVector::new(xi.to_vec())?.into_inner();
    if !(tolerance > 0.0 && tolerance < 0.5) {
        return Err(Error::config(format!("slab tolerance must lie in (0, 1/2), got {tolerance}")));
    }
    match (body.shape, axis_index(&xi)) {
        (BodyShape::Cube { side }, Some(_)) => {
            return Ok(SlabSet {
                xi,
                threshold: side / 4.0,
                exact: true,
            });
        }
        (BodyShape::Ball { radius }, _) => {
            let threshold = radius * band_threshold(body.n as u64 + 2, 0.5)?;
            return Ok(SlabSet { xi, threshold, exact: true });
        }
        _ => {}
    }
    let samples = (2.0 / tolerance).powi(2).ceil() as usize;
    let mut proj = sample_chunked(samples, seed ^ THRESHOLD_SEED_SALT, |rng| {
        let x = sample_point(body, rng);
        x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>().abs()
    });
    proj.sort_by(f64::total_cmp);
    let threshold = 0.5 * (proj[(samples - 1) / 2] + proj[samples / 2]);
    if !(threshold > 0.0) {
        return Err(Error::Numeric("slab threshold estimate is not positive".into()));
    }
    Ok(SlabSet {
        xi,
        threshold,
        exact: false,
    })
}

/// Fraction of `samples` uniform points of the body lying in the slab set.
pub fn slab_volume_fraction(body: &BodyDescriptor, slab: &SlabSet, samples: usize, seed: u64) -> f64 {
    let inside = sample_chunked(samples, seed, |rng| {
        let x = sample_point(body, rng);
        x.iter().zip(&slab.xi).map(|(a, b)| a * b).sum::<f64>().abs() >= slab.threshold
    });
    inside.iter().filter(|&&b| b).count() as f64 / samples as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    /// The chord misses `A_ξ` (ratio exactly 0).
    Zero,
    /// The chord lies in `A_ξ` (ratio exactly 1).
    One,
    Interior,
    /// Zero-length chord.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabRatio {
    pub ratio: f64,
    pub kind: RatioKind,
}

impl SlabRatio {
    pub fn is_zero_one(&self) -> bool {
        matches!(self.kind, RatioKind::Zero | RatioKind::One)
    }
}

/// `length(L ∩ A_ξ) / length(L ∩ K)`.
///
/// Along the line `u(t) = ⟨point, ξ⟩ + t ⟨θ, ξ⟩` is affine, so the part of the
/// chord outside `A_ξ` is the single interval `|u(t)| < t_ξ`.
pub fn slab_chord_ratio(slab: &SlabSet, line: &LineSample, chord: &Chord) -> SlabRatio {
    let len = chord.length();
    if !(len > 0.0) {
        return SlabRatio {
            ratio: 0.0,
            kind: RatioKind::Degenerate,
        };
    }
    let alpha: f64 = line.point.iter().zip(&slab.xi).map(|(a, b)| a * b).sum();
    let beta: f64 = line.direction.coords().iter().zip(&slab.xi).map(|(a, b)| a * b).sum();
    let t = slab.threshold;
    let (one, zero) = (
        SlabRatio {
            ratio: 1.0,
            kind: RatioKind::One,
        },
        SlabRatio {
            ratio: 0.0,
            kind: RatioKind::Zero,
        },
    );
    if beta == 0.0 {
        return if alpha.abs() >= t { one } else { zero };
    }
    let e1 = (-t - alpha) / beta;
    let e2 = (t - alpha) / beta;
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    if hi <= chord.t_minus || lo >= chord.t_plus {
        return one;
    }
    if lo <= chord.t_minus && hi >= chord.t_plus {
        return zero;
    }
    let excluded = hi.min(chord.t_plus) - lo.max(chord.t_minus);
    SlabRatio {
        ratio: (1.0 - excluded / len).clamp(0.0, 1.0),
        kind: RatioKind::Interior,
    }
}

/// Configuration shared by the line experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct LineExperiment {
    pub body: BodyDescriptor,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    /// Slab direction; `e_1` when `None`.
    pub xi: Option<Vec<f64>>,
    /// Volume tolerance of a Monte Carlo slab threshold.
    pub slab_tolerance: f64,
}

impl LineExperiment {
    pub fn new(body: BodyDescriptor, samples: usize, seed: u64) -> Self {
        LineExperiment {
            body,
            samples,
            seed,
            bins: 60,
            xi: None,
            slab_tolerance: 0.005,
        }
    }

    pub fn direction(&self) -> Vec<f64> {
        self.xi
            .clone()
            .unwrap_or_else(|| UnitVector::basis(self.body.n, 0).into_inner())
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::config("samples must be >= 1"));
        }
        if self.bins == 0 {
            return Err(Error::config("bins must be >= 1"));
        }
        Ok(())
    }
}

/// Distribution of the slab ratio along hit-and-run lines and the fraction
/// of lines whose ratio is exactly 0 or 1.
pub fn run_zero_one_experiment(cfg: &LineExperiment) -> Result<ExperimentReport> {
    cfg.validate()?;
    let body = cfg.body;
    let slab = slab_threshold(&body, &cfg.direction(), cfg.slab_tolerance, cfg.seed)?;
    let ratios = sample_chunked(cfg.samples, cfg.seed, |rng| {
        let line = sample_line(&body, rng);
        let c = chord(&body, &line).expect("sampled points lie in the body");
        slab_chord_ratio(&slab, &line, &c)
    });
    let values: Vec<f64> = ratios.iter().map(|r| r.ratio).collect();
    let count = |k: RatioKind| ratios.iter().filter(|r| r.kind == k).count();
    let zero_one = (count(RatioKind::Zero) + count(RatioKind::One)) as f64 / cfg.samples as f64;
    let histogram = Histogram::uniform(&values, cfg.bins, 0.0, 1.0);
    Ok(
        ExperimentReport::from_values("convex", cfg.seed, &values, 0.5, &[0.5, 0.25], histogram)
            .with_metric("zero_one_fraction", zero_one)
            .with_metric("zero_one_std_error", proportion_std_error(zero_one, cfg.samples))
            .with_metric("ratio_zero_fraction", count(RatioKind::Zero) as f64 / cfg.samples as f64)
            .with_metric("ratio_one_fraction", count(RatioKind::One) as f64 / cfg.samples as f64)
            .with_metric("degenerate", count(RatioKind::Degenerate) as f64)
            .with_metric("slab_threshold", slab.threshold)
            .with_config("body", body.kind().name())
            .with_config("n", body.n as u64)
            .with_config("bins", cfg.bins as u64)
            .with_config("slab_exact", slab.exact)
            .with_config("xi", serde_json::json!(slab.xi)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub t: f64,
    pub survival: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub body: BodyKind,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
    pub diameter: f64,
    pub chord_median: f64,
    /// Rate `c` of the `2 e^{-ct}` envelope, fitted on `[median, q90]`.
    pub chord_rate: f64,
    pub chord_fit_end: f64,
    /// Survival `P(ℓ >= t)` on `[median, max]`.
    pub chord_tail: Vec<TailPoint>,
    /// The envelope holds on the extrapolation range `[q90, max]`.
    pub chord_envelope_holds: bool,
    /// `P(|⟨θ, e_1⟩| >= t)` against `2 e^{-n t²/2}`.
    pub direction_tail: Vec<TailPoint>,
    pub direction_envelope_holds: bool,
    /// Largest histogram density of `⟨X, e_1⟩` over bins of width 0.05.
    pub marginal_density_max: f64,
}

impl Emit for TailReport {
    fn to_csv(&self) -> Result<String> {
        let rows: Vec<(&str, f64, f64, f64)> = self
            .chord_tail
            .iter()
            .map(|p| ("chord", p.t, p.survival, p.envelope))
            .chain(self.direction_tail.iter().map(|p| ("direction", p.t, p.survival, p.envelope)))
            .collect();
        rows_csv(&["series", "t", "survival", "envelope"], &rows)
    }
}

const TAIL_GRID: usize = 41;
const DENSITY_BIN: f64 = 0.05;

fn survival(sorted: &[f64], t: f64) -> f64 {
    let below = sorted.partition_point(|&v| v < t);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// Empirical tails of chord lengths, line directions and the body marginal.
pub fn run_tail_checks(cfg: &LineExperiment) -> Result<TailReport> {
    cfg.validate()?;
    let body = cfg.body;
    let n = body.n;
    let draws = sample_chunked(cfg.samples, cfg.seed, |rng| {
        let line = sample_line(&body, rng);
        let c = chord(&body, &line).expect("sampled points lie in the body");
        (c.length(), line.direction.coords()[0], line.point[0])
    });
    let mut lengths: Vec<f64> = draws.iter().map(|d| d.0).collect();
    lengths.sort_by(f64::total_cmp);
    let quantile = |q: f64| lengths[((lengths.len() - 1) as f64 * q).round() as usize];
    let median = quantile(0.5);
    let fit_end = quantile(0.9);
    let max = *lengths.last().expect("samples >= 1");

    let grid: Vec<f64> = (0..TAIL_GRID)
        .map(|i| median + (max - median) * i as f64 / (TAIL_GRID - 1) as f64)
        .collect();
    let rate = grid
        .iter()
        .filter(|&&t| t <= fit_end && t > 0.0)
        .map(|&t| -(survival(&lengths, t) / 2.0).ln() / t)
        .fold(f64::INFINITY, f64::min);
    let chord_tail: Vec<TailPoint> = grid
        .iter()
        .map(|&t| TailPoint {
            t,
            survival: survival(&lengths, t),
            envelope: 2.0 * (-rate * t).exp(),
        })
        .collect();
    let chord_envelope_holds = chord_tail
        .iter()
        .filter(|p| p.t >= fit_end)
        .all(|p| p.survival <= p.envelope);

    let mut dir: Vec<f64> = draws.iter().map(|d| d.1.abs()).collect();
    dir.sort_by(f64::total_cmp);
    let nf = n as f64;
    let direction_tail: Vec<TailPoint> = (0..TAIL_GRID)
        .map(|i| {
            let t = 4.0 * i as f64 / ((TAIL_GRID - 1) as f64 * nf.sqrt());
            TailPoint {
                t,
                survival: survival(&dir, t),
                envelope: 2.0 * (-nf * t * t / 2.0).exp(),
            }
        })
        .collect();
    let direction_envelope_holds = direction_tail.iter().all(|p| p.survival <= p.envelope);

    let marginal: Vec<f64> = draws.iter().map(|d| d.2).collect();
    let lo = marginal.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = marginal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = (((hi - lo) / DENSITY_BIN).ceil() as usize).max(1);
    let hist = Histogram::uniform(&marginal, bins, lo, lo + bins as f64 * DENSITY_BIN);
    let peak = hist.counts.iter().copied().max().unwrap_or(0);
    let marginal_density_max = peak as f64 / (cfg.samples as f64 * DENSITY_BIN);

    Ok(TailReport {
        body: body.kind(),
        n: n as u64,
        samples: cfg.samples as u64,
        seed: cfg.seed,
        diameter: body.diameter(),
        chord_median: median,
        chord_rate: rate,
        chord_fit_end: fit_end,
        chord_tail,
        chord_envelope_holds,
        direction_tail,
        direction_envelope_holds,
        marginal_density_max,
    })
}

/// Bound on the marginal density of an isotropic log-concave body.
pub const MARGINAL_DENSITY_BOUND: f64 = E * SQRT_2;

/// `π_n : S^{2n+1} → Δ_n`, `x ↦ (x_j² + x_{n+1+j}²)_{j=1..n}`; the pair
/// `(x_{n+1}, x_{2n+2})` is the slack coordinate.
pub fn simplex_pushforward(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 4 || x.len() % 2 != 0 {
        return Err(Error::config(format!(
            "pushforward needs a point of R^(2n+2) with n >= 1, got length {}",
            x.len()
        )));
    }
    let n = x.len() / 2 - 1;
    Ok((0..n).map(|j| x[j] * x[j] + x[n + 1 + j] * x[n + 1 + j]).collect())
}

/// First simplex coordinate along the image of the great circle
/// `u cos t + v sin t`: `a + b cos 2t + c sin 2t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseCoordinate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl EllipseCoordinate {
    pub fn from_circle(u: &[f64], v: &[f64]) -> Self {
        let m = u.len() / 2;
        let (u0, v0, u1, v1) = (u[0], v[0], u[m], v[m]);
        EllipseCoordinate {
            a: 0.5 * (u0 * u0 + v0 * v0 + u1 * u1 + v1 * v1),
            b: 0.5 * (u0 * u0 - v0 * v0 + u1 * u1 - v1 * v1),
            c: u0 * v0 + u1 * v1,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.a + self.b * (2.0 * t).cos() + self.c * (2.0 * t).sin()
    }

    /// Exact fraction of the parameter circle where the coordinate is `>= level`.
    pub fn fraction_at_least(&self, level: f64) -> f64 {
        let r = self.b.hypot(self.c);
        if r == 0.0 {
            return if self.a >= level { 1.0 } else { 0.0 };
        }
        ((level - self.a) / r).clamp(-1.0, 1.0).acos() / PI
    }
}

/// Median of the `Beta(1, n)` law of one uniform-simplex coordinate.
pub fn simplex_coordinate_median(n: usize) -> f64 {
    -(-(2f64.ln()) / n as f64).exp_m1()
}

/// `2 μ(A ∩ L) / μ(L)` for random ellipses `L = π_n(great circle)` and
/// `A = {y_1 >= median}`, with `μ` sampled on a 512-point equispaced
/// parameter grid with random phase.
pub fn run_ellipse_experiment(n: usize, samples: usize, seed: u64, bins: usize) -> Result<ExperimentReport> {
    if n < 1 {
        return Err(Error::config("ellipse experiment needs n >= 1"));
    }
    if samples == 0 || bins == 0 {
        return Err(Error::config("samples and bins must be >= 1"));
    }
    let dim = 2 * n + 2;
    let level = simplex_coordinate_median(n);
    let draws = sample_chunked(samples, seed, |rng| {
        let frame = sample_frame(dim, 2, rng).expect("dim >= 4");
        let (u, v) = (&frame.basis()[0], &frame.basis()[1]);
        let coord = EllipseCoordinate::from_circle(u, v);
        let phase = rng.random::<f64>() * 2.0 * PI / ELLIPSE_GRID as f64;
        let hits = (0..ELLIPSE_GRID)
            .filter(|&i| coord.at(phase + 2.0 * PI * i as f64 / ELLIPSE_GRID as f64) >= level)
            .count();
        let grid = 2.0 * hits as f64 / ELLIPSE_GRID as f64;
        (grid, 2.0 * coord.fraction_at_least(level))
    });
    let values: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let max_grid_error = draws.iter().map(|d| (d.0 - d.1).abs()).fold(0.0, f64::max);
    let exact = moments(&draws.iter().map(|d| d.1).collect::<Vec<_>>());
    let hi = values.iter().copied().fold(2.0, f64::max);
    let histogram = Histogram::uniform(&values, bins, 0.0, hi);
    Ok(
        ExperimentReport::from_values("ellipse", seed, &values, 1.0, &[GEODESIC_TAIL_THRESHOLD], histogram)
            .with_metric("level", level)
            .with_metric("max_grid_error", max_grid_error)
            .with_metric("exact_mean", exact.mean)
            .with_metric("exact_std_error", exact.std_error)
            .with_config("n", n as u64)
            .with_config("grid", ELLIPSE_GRID as u64)
            .with_config("bins", bins as u64),
    )
}
