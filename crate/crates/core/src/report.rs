//! Reproducible experiment descriptions and their reports.
//!
//! Reports serialize to JSON (full) and to a flat per-trial CSV with the
//! stable column layout `trial,s_min,s_max,gap,aux1..auxK`. All map-like
//! fields use ordered maps so serialized output is byte-stable across runs
//! and thread counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ensembles::DistributionConfig;
use crate::rng::SeedSpec;

/// Reproducible description of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Registered verifier key.
    pub name: String,
    /// Row count N (samples); meaning documented per verifier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_rows: Option<usize>,
    /// Column count n (ambient dimension).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cols: Option<usize>,
    pub trials: usize,
    pub seed: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionConfig>,
    /// Free-form numeric parameters (t, eps, k, m sweeps are comma-coded
    /// by the verifiers that need lists).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, trials: usize, seed: SeedSpec) -> Self {
        Self {
            name: name.into(),
            n_rows: None,
            n_cols: None,
            trials,
            seed,
            distribution: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_dims(mut self, n_rows: usize, n_cols: usize) -> Self {
        self.n_rows = Some(n_rows);
        self.n_cols = Some(n_cols);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_distribution(mut self, d: DistributionConfig) -> Self {
        self.distribution = Some(d);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

/// One trial of an experiment. `gap` is the per-trial approximate-identity
/// statistic when the verifier has one, else 0.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithFittedConstant { value: f64 },
    Violated { details: String },
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }

    pub fn fitted_constant(&self) -> Option<f64> {
        match self {
            Verdict::HoldsWithFittedConstant { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Names of the aux columns, in CSV order.
    pub aux_names: Vec<String>,
    pub records: Vec<TrialRecord>,
    /// Named scalar summaries, recomputable from the records.
    pub aggregates: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            aux_names: Vec::new(),
            records: Vec::new(),
            aggregates: BTreeMap::new(),
            verdict: Verdict::Holds,
        }
    }

    pub fn aggregate(&self, key: &str) -> Option<f64> {
        self.aggregates.get(key).copied()
    }

    pub fn set_aggregate(&mut self, key: &str, value: f64) {
        self.aggregates.insert(key.to_string(), value);
    }

    /// Flat per-trial table: `trial,s_min,s_max,gap,aux...`. Numbers use
    /// the shortest round-trip decimal representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,s_min,s_max,gap");
        for name in &self.aux_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{},{},{}", r.trial, r.s_min, r.s_max, r.gap);
            for a in &r.aux {
                let _ = write!(out, ",{a}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Everything needed to re-run an experiment bit-identically, plus
/// bookkeeping that is excluded from determinism comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub output_files: Vec<String>,
    pub verdict: Verdict,
}

/// Basic location/scale summaries used across verifiers.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut report = ExperimentReport::new(ExperimentConfig::new(
            "demo",
            2,
            SeedSpec::new(1, 0),
        ));
        report.aux_names = vec!["ratio".into()];
        report.records.push(TrialRecord {
            trial: 0,
            s_min: 1.0,
            s_max: 2.0,
            gap: 0.5,
            aux: vec![0.25],
        });
        let csv = report.to_csv();
        assert!(csv.starts_with("trial,s_min,s_max,gap,ratio\n"));
        assert!(csv.contains("0,1,2,0.5,0.25\n"));
    }

    #[test]
    fn json_round_trip() {
        let mut report = ExperimentReport::new(
            ExperimentConfig::new("demo", 1, SeedSpec::new(7, 3)).with_param("t", 3.0),
        );
        report.verdict = Verdict::HoldsWithFittedConstant { value: 1.5 };
        let text = report.to_json();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.config.param("t"), Some(3.0));
        assert_eq!(back.verdict, report.verdict);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
