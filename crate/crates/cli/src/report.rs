//! JSON analysis report and its plain-text rendering.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use benford_smooth::benford::{benford_pmf, DigitSample};
use benford_smooth::statistic::{Calibration, Statistic, TestResult};

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Explicit,
    Entropy,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDescriptor {
    pub path: PathBuf,
    pub column: Option<String>,
    pub policy: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DigitRow {
    pub digit: u8,
    pub count: u64,
    pub observed: f64,
    pub benford: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationInfo {
    pub requested: Calibration,
    /// Null replications behind every Monte-Carlo decision.
    pub replications: usize,
    pub seed: u64,
    pub seed_source: SeedSource,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestEntry {
    pub id: Statistic,
    #[serde(flatten)]
    pub result: TestResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub n: u64,
    pub skipped: usize,
    pub frequencies: Vec<DigitRow>,
    pub alpha: f64,
    pub calibration: CalibrationInfo,
    pub tests: Vec<TestEntry>,
    pub any_rejection: bool,
    pub timestamp: String,
}

pub fn frequency_table(sample: &DigitSample) -> Vec<DigitRow> {
    let pi = benford_pmf();
    let proportions = sample.proportions();
    (1..=9u8)
        .map(|d| {
            let i = usize::from(d) - 1;
            DigitRow {
                digit: d,
                count: sample.counts()[i],
                observed: proportions[i],
                benford: pi.probs()[i],
            }
        })
        .collect()
}

impl AnalysisReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}  (skipped {})", self.n, self.skipped);
        let _ = writeln!(out, "digit  count  observed  benford");
        for row in &self.frequencies {
            let _ = writeln!(
                out,
                "{:>5}  {:>5}  {:>8.4}  {:>7.4}",
                row.digit, row.count, row.observed, row.benford
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "test         statistic   critical    p-value  method       decision");
        for t in &self.tests {
            let p = t.result.p_value.map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
            let method = match t.result.calibration {
                benford_smooth::statistic::CalibrationMethod::Asymptotic => "asymptotic",
                benford_smooth::statistic::CalibrationMethod::MonteCarlo => "monte-carlo",
            };
            let mut id = t.id.id();
            if let Some(k) = t.result.selected_k {
                id.push_str(&format!(" (K={k})"));
            }
            let _ = writeln!(
                out,
                "{id:<12} {:>10.5} {:>10.5} {p:>10}  {method:<12} {}",
                t.result.statistic,
                t.result.critical_value,
                if t.result.reject { "reject" } else { "accept" }
            );
        }
        out
    }
}
