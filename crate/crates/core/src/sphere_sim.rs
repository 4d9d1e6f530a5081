//! Random geodesics and random `k`-dimensional subspaces on `S^{n-1}`.
//!
//! For the symmetric test sets (bands around the equator `x_1 = 0` and the
//! hemisphere) the section measure `σ_H(A ∩ H)` has a closed form in
//! `ρ = |P_H e_1|`: the unit sphere of `H` sees `x_1 = ρ ⟨y, u⟩`, so a band
//! of threshold `T` in `S^{n-1}` becomes a band of threshold `T/ρ` in
//! `S^{k-1}`. Each Monte Carlo sample is therefore one Haar frame and one
//! exact evaluation.

use std::f64::consts::{FRAC_2_PI, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{moments, proportion_std_error, sample_chunked, Histogram};
use crate::report::{rows_csv, Emit, ExperimentReport};
use crate::specfun::quadrature::integrate;
use crate::specfun::{band_measure, band_threshold, BandSpec};
use crate::spectrum::{correlation_eigenvalue, variance_bound, CorrelationQuery};

/// Threshold `2^{-1/3}` at which the geodesic tail bound equals itself.
pub const GEODESIC_TAIL_THRESHOLD: f64 = 0.793_700_525_984_099_7;

const HISTOGRAM_BINS: usize = 60;
const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes `coords`; fails on the zero vector.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        coords.iter_mut().for_each(|x| *x /= norm);
        Ok(UnitVector(coords))
    }

    /// The standard basis vector `e_{index+1}` of `R^n`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[index] = 1.0;
        UnitVector(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `k` orthonormal vectors in `R^n` spanning a subspace `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl OrthonormalFrame {
    /// The full standard basis (`k = n`).
    pub fn identity(n: usize) -> Self {
        let basis = (0..n).map(|i| UnitVector::basis(n, i).into_inner()).collect();
        OrthonormalFrame { n, basis }
    }

    /// Wraps vectors that are already orthonormal to within `1e-10`.
    pub fn from_orthonormal(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.first().map_or(0, Vec::len);
        if basis.iter().any(|b| b.len() != n) || n == 0 {
            return Err(Error::domain("frame vectors must share a nonzero dimension"));
        }
        let frame = OrthonormalFrame { n, basis };
        if frame.max_gram_error() > ORTHOGONALITY_TOL {
            return Err(Error::domain("frame vectors are not orthonormal"));
        }
        Ok(frame)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `|P_H e_1|²`.
    pub fn first_coordinate_projection_sq(&self) -> f64 {
        self.basis.iter().map(|b| b[0] * b[0]).sum()
    }

    /// Largest entry of `|B Bᵀ - I|`.
    pub fn max_gram_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.basis.len() {
            for j in 0..=i {
                let d = dot(&self.basis[i], &self.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// A uniform point on the unit sphere of `H`.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let weights: Vec<f64> = (0..self.k()).map(|_| rng.sample(StandardNormal)).collect();
            let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let mut point = vec![0.0; self.n];
            for (w, b) in weights.iter().zip(&self.basis) {
                for (p, x) in point.iter_mut().zip(b) {
                    *p += w / norm * x;
                }
            }
            return point;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point on `S^{n-1}` by normalizing a standard Gaussian vector.
pub fn sample_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitVector> {
    if n < 2 {
        return Err(Error::domain(format!("sphere sampling needs n >= 2, got {n}")));
    }
    loop {
        if let Ok(v) = UnitVector::new(gaussian_vector(n, rng)) {
            return Ok(v);
        }
    }
}

// Modified Gram–Schmidt of `vectors[i]` against the previous vectors.
// Returns false on (near) rank deficiency.
fn orthonormalize(vectors: &mut [Vec<f64>], i: usize) -> bool {
    let original = vectors[i].iter().map(|x| x * x).sum::<f64>().sqrt();
    let (done, rest) = vectors.split_at_mut(i);
    let v = &mut rest[0];
    for b in done.iter() {
        let c = dot(v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > ORTHOGONALITY_TOL * original) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Haar-distributed `k`-frame: a Gaussian `k × n` block orthonormalized by
/// modified Gram–Schmidt, with a second pass if any inner product exceeds
/// `1e-10`.
pub fn sample_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<OrthonormalFrame> {
    if k < 2 || k >= n {
        return Err(Error::domain(format!("frames need 2 <= k <= n-1, got k={k}, n={n}")));
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        basis.push(gaussian_vector(n, rng));
        let i = basis.len() - 1;
        if !orthonormalize(&mut basis, i) {
            basis.pop();
        }
    }
    let mut frame = OrthonormalFrame { n, basis };
    if frame.max_gram_error() > ORTHOGONALITY_TOL {
        for i in 0..k {
            orthonormalize(&mut frame.basis, i);
        }
    }
    Ok(frame)
}

/// Geodesic through a uniform point `X` in a uniform unit tangent direction
/// `Y ∈ T_X S^{n-1}`, returned as the frame `(X, Y)`.
pub fn sample_tangent_geodesic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OrthonormalFrame> {
    let point = sample_unit_vector(n, rng)?.into_inner();
    loop {
        let mut basis = vec![point.clone(), gaussian_vector(n, rng)];
        if orthonormalize(&mut basis, 1) {
            return Ok(OrthonormalFrame { n, basis });
        }
    }
}

/// Which symmetric set of `S^{n-1}` is being sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    /// `|x_1| >= threshold`
    Band { threshold: f64 },
    /// `|x_1| <= threshold`
    CentralBand { threshold: f64 },
    /// `x_1 >= 0`
    Hemisphere,
}

/// A symmetric test set together with its exact measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSet {
    n: usize,
    kind: SetKind,
    measure: f64,
}

impl SphereSet {
    pub fn new(n: usize, kind: SetKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("sphere sets need n >= 2, got {n}")));
        }
        let measure = match kind {
            SetKind::Band { threshold } => band_measure(BandSpec::new(n as u64, threshold)?),
            SetKind::CentralBand { threshold } => 1.0 - band_measure(BandSpec::new(n as u64, threshold)?),
            SetKind::Hemisphere => 0.5,
        };
        Ok(SphereSet { n, kind, measure })
    }

    /// Band `|x_1| >= T` with `T` tuned so the band has the given measure.
    pub fn band_with_measure(n: usize, measure: f64) -> Result<Self> {
        let threshold = band_threshold(n as u64, measure)?;
        Self::new(n, SetKind::Band { threshold })
    }

    /// Central band `|x_1| <= T` with the given measure.
    pub fn central_band_with_measure(n: usize, measure: f64) -> Result<Self> {
        let threshold = band_threshold(n as u64, 1.0 - measure)?;
        Self::new(n, SetKind::CentralBand { threshold })
    }

    pub fn hemisphere(n: usize) -> Self {
        SphereSet {
            n,
            kind: SetKind::Hemisphere,
            measure: 0.5,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn threshold(&self) -> Option<f64> {
        match self.kind {
            SetKind::Band { threshold } | SetKind::CentralBand { threshold } => Some(threshold),
            SetKind::Hemisphere => None,
        }
    }
}

/// Measurable subset of `S^{n-1}` that can be intersected with subspheres.
pub trait SphereRegion: Sync {
    fn dim(&self) -> usize;
    fn measure(&self) -> f64;
    fn contains(&self, x: &[f64]) -> bool;
    /// Exact `σ_H(A ∩ H)` when a closed form is known.
    fn exact_section(&self, _frame: &OrthonormalFrame) -> Option<f64> {
        None
    }
}

// σ of {|⟨y, u⟩| >= s} on S^{k-1}
fn band_fraction(k: usize, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    match k {
        2 => FRAC_2_PI * s.acos(),
        3 => 1.0 - s,
        _ => band_measure(BandSpec::new(k as u64, s).expect("valid band")),
    }
}

fn band_section(k: usize, threshold: f64, rho: f64) -> f64 {
    if rho <= threshold {
        0.0
    } else {
        band_fraction(k, threshold / rho)
    }
}

impl SphereRegion for SphereSet {
    fn dim(&self) -> usize {
        self.n
    }

    fn measure(&self) -> f64 {
        self.measure
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self.kind {
            SetKind::Band { threshold } => x[0].abs() >= threshold,
            SetKind::CentralBand { threshold } => x[0].abs() <= threshold,
            SetKind::Hemisphere => x[0] >= 0.0,
        }
    }

    fn exact_section(&self, frame: &OrthonormalFrame) -> Option<f64> {
        let rho = frame.first_coordinate_projection_sq().sqrt();
        let k = frame.k();
        Some(match self.kind {
            SetKind::Band { threshold } => band_section(k, threshold, rho),
            SetKind::CentralBand { threshold } => 1.0 - band_section(k, threshold, rho),
            SetKind::Hemisphere => {
                if rho > 0.0 {
                    0.5
                } else {
                    1.0
                }
            }
        })
    }
}

/// A region given only by a membership predicate and its known measure;
/// sections are estimated by sampling.
pub struct PredicateSet<F> {
    pub n: usize,
    pub measure: f64,
    pub predicate: F,
}

impl<F: Fn(&[f64]) -> bool + Sync> SphereRegion for PredicateSet<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn measure(&self) -> f64 {
        self.measure
    }

    fn contains(&self, x: &[f64]) -> bool {
        (self.predicate)(x)
    }
}

/// Exact fraction of the great circle spanned by a 2-frame that lies in a
/// symmetric set: for a band, `(2/π) arccos(T/r)` with `r² = u_1² + v_1²`.
pub fn geodesic_band_fraction(set: &SphereSet, frame: &OrthonormalFrame) -> Result<f64> {
    if frame.k() != 2 {
        return Err(Error::domain(format!("geodesics need a 2-frame, got k={}", frame.k())));
    }
    check_dims(set.n, frame)?;
    Ok(set.exact_section(frame).expect("symmetric sets have closed forms"))
}

fn check_dims(n: usize, frame: &OrthonormalFrame) -> Result<()> {
    if frame.n() != n {
        return Err(Error::domain(format!("frame lives in R^{} but set in R^{n}", frame.n())));
    }
    Ok(())
}

/// `σ_H(A ∩ H)`: exact for regions with a closed form, otherwise the
/// fraction of `samples` uniform points of `S^{n-1} ∩ H` that land in `A`.
pub fn subspace_section_estimate<R: Rng + ?Sized>(
    set: &dyn SphereRegion,
    frame: &OrthonormalFrame,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if frame.k() < 2 {
        return Err(Error::domain("sections need k >= 2"));
    }
    check_dims(set.dim(), frame)?;
    if let Some(exact) = set.exact_section(frame) {
        return Ok(exact);
    }
    if samples == 0 {
        return Err(Error::config("predicate sets need a positive sample count"));
    }
    let hits = (0..samples).filter(|_| set.contains(&frame.sample_point(rng))).count();
    Ok(hits as f64 / samples as f64)
}

/// Configuration of a sphere intersection experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereExperiment {
    pub n: usize,
    pub k: usize,
    pub set: SphereSet,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
}

impl SphereExperiment {
    pub fn new(n: usize, k: usize, set: SphereSet, samples: usize, seed: u64) -> Self {
        SphereExperiment {
            n,
            k,
            set,
            samples,
            seed,
            bins: HISTOGRAM_BINS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::config("samples must be >= 1"));
        }
        if self.k < 2 || self.k >= self.n {
            return Err(Error::config(format!(
                "subspace dimension must satisfy 2 <= k <= n-1, got k={}, n={}",
                self.k, self.n
            )));
        }
        if self.set.n() != self.n {
            return Err(Error::config("set dimension does not match n"));
        }
        if self.bins == 0 {
            return Err(Error::config("bins must be >= 1"));
        }
        Ok(())
    }
}

/// Distribution of `X = σ_H(A ∩ H) / σ(A)` over Haar-random `k`-subspaces.
pub fn run_sphere_experiment(cfg: &SphereExperiment) -> Result<ExperimentReport> {
    cfg.validate()?;
    let set = cfg.set;
    let measure = set.measure();
    let values = sample_chunked(cfg.samples, cfg.seed, |rng| {
        let frame = sample_frame(cfg.n, cfg.k, rng).expect("validated dimensions");
        set.exact_section(&frame).expect("closed form") / measure
    });
    let hi = values.iter().copied().fold(2.0, f64::max);
    let histogram = Histogram::uniform(&values, cfg.bins, 0.0, hi);
    let zero_fraction = values.iter().filter(|&&x| x == 0.0).count() as f64 / values.len() as f64;
    let mut report = ExperimentReport::from_values(
        "sphere",
        cfg.seed,
        &values,
        1.0,
        &[GEODESIC_TAIL_THRESHOLD, 0.5, 0.25, 0.1],
        histogram,
    )
    .with_metric("set_measure", measure)
    .with_metric("p_zero", zero_fraction)
    .with_metric("p_zero_std_error", proportion_std_error(zero_fraction, values.len()))
    .with_config("n", cfg.n as u64)
    .with_config("k", cfg.k as u64)
    .with_config("bins", cfg.bins as u64)
    .with_config("set", serde_json::to_value(set.kind()).expect("plain enum"));
    if measure > 0.0 && measure < 1.0 {
        let bound = variance_bound(cfg.n as u64, cfg.k as u64, measure)?;
        report = report.with_metric("variance_bound", bound);
    }
    if let (2, SetKind::Band { threshold }) = (cfg.k, set.kind()) {
        let oracle = geodesic_band_moments(cfg.n, threshold)?;
        report = report
            .with_metric("oracle_mean", oracle.mean / measure)
            .with_metric("oracle_variance", oracle.second_moment / (measure * measure) - 1.0);
    }
    Ok(report)
}

/// Exact moments of the geodesic band fraction `g(r) = (2/π) arccos(T/r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicMoments {
    pub mean: f64,
    pub second_moment: f64,
}

/// `E g` and `E g²` for a uniform great circle, using that `r² = u_1² + v_1²`
/// follows `Beta(1, (n-2)/2)`.
pub fn geodesic_band_moments(n: usize, threshold: f64) -> Result<GeodesicMoments> {
    if n < 3 {
        return Err(Error::domain("geodesic moments need n >= 3"));
    }
    let beta = (n as f64 - 2.0) / 2.0;
    let t2 = threshold * threshold;
    if t2 >= 1.0 {
        return Ok(GeodesicMoments {
            mean: 0.0,
            second_moment: 0.0,
        });
    }
    let density = |s: f64| beta * ((beta - 1.0) * (-s).ln_1p()).exp();
    let g = |s: f64| if s <= t2 { 0.0 } else { FRAC_2_PI * (threshold / s.sqrt()).min(1.0).acos() };
    // s = T² + v² smooths the square-root onset of g at s = T²
    let upper = (1.0 - t2).sqrt();
    let moment = |power: i32| {
        integrate(
            |v: f64| {
                let s = t2 + v * v;
                2.0 * v * g(s).powi(power) * density(s)
            },
            0.0,
            upper,
            1e-14,
            0.0,
        )
        .value
    };
    if threshold == 0.0 {
        return Ok(GeodesicMoments {
            mean: 1.0,
            second_moment: 1.0,
        });
    }
    Ok(GeodesicMoments {
        mean: moment(1),
        second_moment: moment(2),
    })
}

/// Empirical vs analytic `P(X = 0)` for the half-measure band in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub n: u64,
    pub threshold: f64,
    pub samples: u64,
    pub p_zero: f64,
    pub std_error: f64,
    /// `1 - (1 - T²)^{(n-2)/2}`
    pub p_zero_oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub seed: u64,
    pub rows: Vec<SharpnessRow>,
}

impl Emit for SharpnessReport {
    fn to_csv(&self) -> Result<String> {
        rows_csv(&["n", "threshold", "samples", "p_zero", "std_error", "p_zero_oracle"], &self.rows)
    }
}

/// For each `n`, the probability that a random great circle misses the
/// half-measure band `|x_1| >= T` entirely.
pub fn run_sharpness_check(dims: &[usize], samples: usize, seed: u64) -> Result<SharpnessReport> {
    if samples == 0 {
        return Err(Error::config("samples must be >= 1"));
    }
    let mut rows = Vec::with_capacity(dims.len());
    for &n in dims {
        if n < 4 {
            return Err(Error::config(format!("sharpness check needs n >= 4, got {n}")));
        }
        let set = SphereSet::band_with_measure(n, 0.5)?;
        let threshold = set.threshold().expect("band");
        let misses = sample_chunked(samples, seed ^ n as u64, |rng| {
            let frame = sample_frame(n, 2, rng).expect("n >= 4");
            set.exact_section(&frame).expect("closed form") == 0.0
        });
        let p_zero = misses.iter().filter(|&&m| m).count() as f64 / samples as f64;
        let oracle = 1.0 - (1.0 - threshold * threshold).powf((n as f64 - 2.0) / 2.0);
        rows.push(SharpnessRow {
            n: n as u64,
            threshold,
            samples: samples as u64,
            p_zero,
            std_error: proportion_std_error(p_zero, samples),
            p_zero_oracle: oracle,
        });
    }
    Ok(SharpnessReport { seed, rows })
}

/// Test function for the subspace/complement correlation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `x_1² - 1/n`, a zonal harmonic of degree two.
    ZonalQuadratic,
    /// `f ≡ 1`
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n: u64,
    pub k: u64,
    pub samples: u64,
    pub seed: u64,
    pub function: TestFunction,
    pub estimate: f64,
    pub std_error: f64,
    /// `η_2 ‖f‖²` (or 1 for the constant function).
    pub predicted: f64,
}

impl Emit for CorrelationReport {
    fn to_csv(&self) -> Result<String> {
        rows_csv(
            &["n", "k", "samples", "seed", "function", "estimate", "std_error", "predicted"],
            &[(
                self.n,
                self.k,
                self.samples,
                self.seed,
                match self.function {
                    TestFunction::ZonalQuadratic => "zonal_quadratic",
                    TestFunction::Constant => "constant",
                },
                self.estimate,
                self.std_error,
                self.predicted,
            )],
        )
    }
}

/// Monte Carlo estimate of `∫ R_k f(H) R_{n-k} f(H^⊥)` over the Grassmannian.
///
/// With `ρ² = |P_H e_1|²`, the averages of `x_1²` over the unit spheres of
/// `H` and `H^⊥` are `ρ²/k` and `(1-ρ²)/(n-k)`.
pub fn run_correlation_experiment(
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
    function: TestFunction,
) -> Result<CorrelationReport> {
    if k < 2 || k + 2 > n {
        return Err(Error::config(format!("correlation needs 2 <= k <= n-2, got k={k}, n={n}")));
    }
    if samples == 0 {
        return Err(Error::config("samples must be >= 1"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let values = sample_chunked(samples, seed, |rng| {
        let frame = sample_frame(n, k, rng).expect("validated dimensions");
        match function {
            TestFunction::Constant => 1.0,
            TestFunction::ZonalQuadratic => {
                let rho2 = frame.first_coordinate_projection_sq();
                (rho2 / kf - 1.0 / nf) * ((1.0 - rho2) / (nf - kf) - 1.0 / nf)
            }
        }
    });
    let m = moments(&values);
    let predicted = match function {
        TestFunction::Constant => 1.0,
        TestFunction::ZonalQuadratic => {
            // ‖x_1² - 1/n‖² = E x_1⁴ - 1/n² with E x_1⁴ = 3/(n(n+2))
            let norm_sq = 3.0 / (nf * (nf + 2.0)) - 1.0 / (nf * nf);
            correlation_eigenvalue(CorrelationQuery::new(n as u64, 1)?) * norm_sq
        }
    };
    Ok(CorrelationReport {
        n: n as u64,
        k: k as u64,
        samples: samples as u64,
        seed,
        function,
        estimate: m.mean,
        std_error: m.std_error,
        predicted,
    })
}

/// `∫_0^{2π}` helper used by tests: exact arc fraction of a circle
/// `r cos(t - φ)` above a level.
#[doc(hidden)]
pub fn arc_fraction_above(r: f64, level: f64) -> f64 {
    if r <= level.abs() {
        return if level < 0.0 { 1.0 } else { 0.0 };
    }
    (level / r).acos() / PI
}
