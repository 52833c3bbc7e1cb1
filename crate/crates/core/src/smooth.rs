//! Smooth statistics U_k and T_K, the penalized order selection of the
//! data-driven statistic, and the corresponding tests.

use serde::Serialize;

use crate::benford::{standard_system, DigitSample, MAX_ORDER};
use crate::error::{Error, Result};
use crate::statistic::{run_test, Calibration, McSettings, Statistic, TestResult};

/// Default upper bound of the order search for the data-driven statistic.
pub const DEFAULT_K_MAX: usize = 5;

/// Components U_1..U_K and partial sums T_1..T_K of one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothStatistics {
    u: Vec<f64>,
    t: Vec<f64>,
    n: u64,
}

impl SmoothStatistics {
    pub fn components(&self) -> &[f64] {
        &self.u
    }

    /// T_1..T_K.
    pub fn partial_sums(&self) -> &[f64] {
        &self.t
    }

    /// T_k for 1 ≤ k ≤ K.
    pub fn t(&self, k: usize) -> f64 {
        self.t[k - 1]
    }

    pub fn order(&self) -> usize {
        self.u.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

pub(crate) fn check_order(k: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&k) {
        Ok(())
    } else {
        Err(Error::Domain(format!("order {k} outside 1..={MAX_ORDER}")))
    }
}

/// U_k = n^{-1/2} Σ_d n_d h_k(d), computed from counts.
pub fn smooth_components(sample: &DigitSample, k: usize) -> Result<SmoothStatistics> {
    check_order(k)?;
    let system = standard_system();
    let scale = (sample.n() as f64).sqrt().recip();
    let mut u = Vec::with_capacity(k);
    let mut t = Vec::with_capacity(k);
    let mut acc = 0.0;
    for order in 1..=k {
        let sum: f64 = sample
            .counts()
            .iter()
            .zip(system.values(order).iter())
            .map(|(&c, h)| c as f64 * h)
            .sum();
        let component = sum * scale;
        acc += component * component;
        u.push(component);
        t.push(acc);
    }
    Ok(SmoothStatistics { u, t, n: sample.n() })
}

/// Smallest maximizer of T_k − k·ln(n) over the supplied partial sums.
pub fn select_order(partial_sums: &[f64], n: u64) -> usize {
    let penalty = (n as f64).ln();
    let mut best = 1;
    let mut best_score = f64::NEG_INFINITY;
    for (idx, t) in partial_sums.iter().enumerate() {
        let score = t - (idx + 1) as f64 * penalty;
        if score > best_score {
            best = idx + 1;
            best_score = score;
        }
    }
    best
}

/// Selected order K̂ and the statistic T_K̂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Selection {
    pub order: usize,
    pub statistic: f64,
}

pub fn data_driven_select(sample: &DigitSample, k_max: usize) -> Result<Selection> {
    let stats = smooth_components(sample, k_max)?;
    let order = select_order(stats.partial_sums(), sample.n());
    Ok(Selection {
        order,
        statistic: stats.t(order),
    })
}

/// Test based on T_K. Asymptotic calibration uses the χ²_K quantile.
pub fn smooth_test(
    sample: &DigitSample,
    k: usize,
    alpha: f64,
    calibration: Calibration,
    mc: Option<&McSettings>,
) -> Result<TestResult> {
    check_order(k)?;
    run_test(Statistic::Smooth(k), sample, alpha, calibration, mc)
}

/// Test based on T_K̂. Asymptotic calibration uses the χ²_1 quantile; Monte
/// Carlo calibration reruns the order selection on every null replication.
pub fn data_driven_test(
    sample: &DigitSample,
    k_max: usize,
    alpha: f64,
    calibration: Calibration,
    mc: Option<&McSettings>,
) -> Result<TestResult> {
    check_order(k_max)?;
    run_test(Statistic::DataDriven(k_max), sample, alpha, calibration, mc)
}
