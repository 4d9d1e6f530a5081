//! Experiment reports and their on-disk formats.
//!
//! JSON uses the struct field order (maps are sorted), CSV uses `,` with a
//! `\n` terminator. Floats are printed in shortest round-trip form, so equal
//! reports always serialize to equal bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{moments, tail_probability, Histogram};
use crate::spectrum::SpectrumRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailProb {
    pub threshold: f64,
    pub probability: f64,
}

/// Summary of a Monte Carlo experiment over a scalar random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub variance_std_error: f64,
    pub min: f64,
    pub max: f64,
    /// Empirical `P(|X - center| >= threshold)`, centered where the
    /// experiment says (`metrics["tail_center"]`).
    pub tail_probs: Vec<TailProb>,
    pub histogram: Histogram,
    pub metrics: BTreeMap<String, f64>,
    pub config: BTreeMap<String, serde_json::Value>,
}

impl ExperimentReport {
    /// Builds the statistical part of a report from the ordered sample values.
    pub fn from_values(
        experiment: &str,
        seed: u64,
        values: &[f64],
        tail_center: f64,
        tail_thresholds: &[f64],
        histogram: Histogram,
    ) -> Self {
        let m = moments(values);
        let tail_probs = tail_thresholds
            .iter()
            .map(|&t| TailProb {
                threshold: t,
                probability: tail_probability(values, tail_center, t),
            })
            .collect();
        let mut metrics = BTreeMap::new();
        metrics.insert("tail_center".to_string(), tail_center);
        ExperimentReport {
            experiment: experiment.to_string(),
            seed,
            samples: m.count,
            mean: m.mean,
            variance: m.variance,
            std_error: m.std_error,
            variance_std_error: m.variance_std_error,
            min: m.min,
            max: m.max,
            tail_probs,
            histogram,
            metrics,
            config: BTreeMap::new(),
        }
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn with_config(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}

/// Anything that can be written as a CSV table and a JSON document.
pub trait Emit: Serialize {
    fn to_csv(&self) -> Result<String>;

    fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numeric(format!("cannot serialize report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn csv_string<F>(fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    fill(&mut writer).map_err(|e| Error::Numeric(format!("csv encoding failed: {e}")))?;
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Numeric(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numeric(e.to_string()))
}

/// The histogram as `bin_left,bin_right,count`.
pub fn histogram_csv(histogram: &Histogram) -> Result<String> {
    csv_string(|w| {
        w.write_record(["bin_left", "bin_right", "count"])?;
        for (left, right, count) in histogram.bins() {
            w.serialize((left, right, count))?;
        }
        Ok(())
    })
}

impl Emit for ExperimentReport {
    fn to_csv(&self) -> Result<String> {
        histogram_csv(&self.histogram)
    }
}

impl Emit for Vec<SpectrumRow> {
    fn to_csv(&self) -> Result<String> {
        csv_string(|w| {
            w.write_record(["n", "k", "ell", "lambda_sq"])?;
            for row in self {
                w.serialize((row.n, row.k, row.ell, row.lambda_sq))?;
            }
            Ok(())
        })
    }
}

/// Serializes `report` and writes it to `path` (or just returns the text).
pub fn emit_report<T: Emit + ?Sized>(report: &T, format: Format, path: Option<&Path>) -> Result<String> {
    let text = report.render(format)?;
    if let Some(path) = path {
        fs::write(path, text.as_bytes()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(text)
}

/// Writes a plain CSV table with the given header.
pub(crate) fn rows_csv<R: Serialize>(header: &[&str], rows: &[R]) -> Result<String> {
    csv_string(|w| {
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        Ok(())
    })
}
