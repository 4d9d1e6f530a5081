//! Deterministic chunked random streams and summary statistics.
//!
//! Every experiment splits its sample indices into fixed-size chunks. Chunk
//! `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so results
//! depend only on `(seed, samples)` and never on how rayon schedules chunks.
//! Reductions run sequentially over the ordered per-sample values with
//! compensated summation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CHUNK_SIZE: usize = 1024;

/// RNG for chunk `chunk` of an experiment seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Draws `samples` values with `draw`, chunk by chunk, in sample order.
pub fn sample_chunked<T, F>(samples: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let len = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Standard error of the sample variance from the fourth central moment.
    pub variance_std_error: f64,
    pub min: f64,
    pub max: f64,
}

pub fn moments(values: &[f64]) -> Moments {
    let count = values.len();
    if count == 0 {
        return Moments {
            count: 0,
            mean: 0.0,
            variance: 0.0,
            std_error: 0.0,
            variance_std_error: 0.0,
            min: 0.0,
            max: 0.0,
        };
    }
    let nf = count as f64;
    let mean = compensated_sum(values.iter().copied()) / nf;
    let m2 = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / nf;
    let m4 = compensated_sum(values.iter().map(|v| (v - mean).powi(4))) / nf;
    let variance = if count > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let variance_std_error = if count > 3 {
        ((m4 - (nf - 3.0) / (nf - 1.0) * variance * variance) / nf).max(0.0).sqrt()
    } else {
        0.0
    };
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Moments {
        count: count as u64,
        mean,
        variance,
        std_error: (variance / nf).sqrt(),
        variance_std_error,
        min,
        max,
    }
}

/// Empirical `P(|X - center| >= t)`.
pub fn tail_probability(values: &[f64], center: f64, t: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|v| (*v - center).abs() >= t).count() as f64 / values.len() as f64
}

/// Standard error of an empirical proportion.
pub fn proportion_std_error(p: f64, count: usize) -> f64 {
    (p * (1.0 - p) / count as f64).sqrt()
}

/// Uniform-bin histogram; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn empty() -> Self {
        Histogram {
            edges: Vec::new(),
            counts: Vec::new(),
        }
    }

    pub fn uniform(values: &[f64], bins: usize, lo: f64, hi: f64) -> Self {
        if bins == 0 || !(hi > lo) {
            return Self::empty();
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = (((v - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bins as `(left, right, count)`.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(e, &c)| (e[0], e[1], c))
    }
}

/// One-sample Kolmogorov–Smirnov distance against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance, exact in the presence of ties.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
