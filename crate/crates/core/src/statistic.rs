//! Registry of every test statistic, with evaluation on a sample and the
//! shared decision logic (asymptotic or Monte-Carlo calibration).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::benford::{DigitSample, MAX_ORDER};
use crate::classic;
use crate::error::{Error, Result};
use crate::mc::{self, McConfig};
use crate::smooth;

/// Sample size below which `Calibration::Auto` switches to Monte Carlo.
pub const AUTO_MC_THRESHOLD: u64 = 100;

/// A registered test statistic. Every statistic rejects for large values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// T_K.
    Smooth(usize),
    /// T_K̂ with the given K_max.
    DataDriven(usize),
    Pearson,
    CramerVonMises,
    Watson,
    AndersonDarling,
    Kolmogorov,
    MaxDeviation,
    Euclidean,
    Mad,
    AStar,
}

impl Statistic {
    /// The comparison set: T_2, T_K̂ (K_max = 5), Watson, MAD and Pearson.
    pub const DEFAULT_BATTERY: [Statistic; 5] = [
        Statistic::Smooth(2),
        Statistic::DataDriven(smooth::DEFAULT_K_MAX),
        Statistic::Watson,
        Statistic::Mad,
        Statistic::Pearson,
    ];

    /// The nine statistics that are not smooth statistics.
    pub const CLASSIC: [Statistic; 9] = [
        Statistic::Pearson,
        Statistic::CramerVonMises,
        Statistic::Watson,
        Statistic::AndersonDarling,
        Statistic::Kolmogorov,
        Statistic::MaxDeviation,
        Statistic::Euclidean,
        Statistic::Mad,
        Statistic::AStar,
    ];

    /// Default battery plus every remaining classic statistic.
    pub fn full_battery() -> Vec<Statistic> {
        let mut all = Self::DEFAULT_BATTERY.to_vec();
        all.extend(Self::CLASSIC.iter().filter(|s| !all.contains(s)).collect::<Vec<_>>());
        all
    }

    pub fn id(&self) -> String {
        match self {
            Statistic::Smooth(k) => format!("T{k}"),
            Statistic::DataDriven(k) => format!("TK{k}"),
            Statistic::Pearson => "chi2".into(),
            Statistic::CramerVonMises => "W2".into(),
            Statistic::Watson => "U2".into(),
            Statistic::AndersonDarling => "A2".into(),
            Statistic::Kolmogorov => "K".into(),
            Statistic::MaxDeviation => "m".into(),
            Statistic::Euclidean => "d".into(),
            Statistic::Mad => "MAD".into(),
            Statistic::AStar => "astar".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Statistic::Smooth(k) | Statistic::DataDriven(k) => smooth::check_order(*k),
            _ => Ok(()),
        }
    }

    /// Degrees of freedom of the limiting χ² law, when one is used.
    pub fn asymptotic_df(&self) -> Option<usize> {
        match self {
            Statistic::Smooth(k) => Some(*k),
            Statistic::DataDriven(_) => Some(1),
            Statistic::Pearson => Some(8),
            _ => None,
        }
    }

    pub fn evaluate(&self, sample: &DigitSample) -> Result<f64> {
        Ok(match self {
            Statistic::Smooth(k) => smooth::smooth_components(sample, *k)?.t(*k),
            Statistic::DataDriven(k) => smooth::data_driven_select(sample, *k)?.statistic,
            Statistic::Pearson => classic::pearson_chi_square(sample),
            Statistic::CramerVonMises => classic::cramer_von_mises(sample),
            Statistic::Watson => classic::watson(sample),
            Statistic::AndersonDarling => classic::anderson_darling(sample),
            Statistic::Kolmogorov => classic::kolmogorov(sample),
            Statistic::MaxDeviation => classic::max_deviation_m(sample),
            Statistic::Euclidean => classic::euclidean_d(sample),
            Statistic::Mad => classic::mad(sample),
            Statistic::AStar => classic::a_star(sample),
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    /// Accepts the ids produced by [`Statistic::id`], case-insensitively,
    /// plus `TK` for the default K_max.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownStatistic(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let order = |digits: &str| -> Result<usize> {
            let k: usize = digits.parse().map_err(|_| unknown())?;
            if (1..=MAX_ORDER).contains(&k) {
                Ok(k)
            } else {
                Err(unknown())
            }
        };
        let stat = match lower.as_str() {
            "tk" => Statistic::DataDriven(smooth::DEFAULT_K_MAX),
            "chi2" => Statistic::Pearson,
            "w2" => Statistic::CramerVonMises,
            "u2" => Statistic::Watson,
            "a2" => Statistic::AndersonDarling,
            "k" => Statistic::Kolmogorov,
            "m" => Statistic::MaxDeviation,
            "d" => Statistic::Euclidean,
            "mad" => Statistic::Mad,
            "astar" => Statistic::AStar,
            other => {
                if let Some(rest) = other.strip_prefix("tk") {
                    Statistic::DataDriven(order(rest)?)
                } else if let Some(rest) = other.strip_prefix('t') {
                    Statistic::Smooth(order(rest)?)
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(stat)
    }
}

impl Serialize for Statistic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Statistic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Requested calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Calibration {
    /// Monte Carlo below n = 100 or when no asymptotic law exists,
    /// asymptotic otherwise.
    #[default]
    Auto,
    Asymptotic,
    MonteCarlo,
}

/// Calibration actually used for a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMethod {
    Asymptotic,
    MonteCarlo,
}

/// Monte-Carlo settings for calibrating a single test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub replications: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    /// K̂ for the data-driven statistic.
    pub selected_k: Option<usize>,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub reject: bool,
    pub calibration: CalibrationMethod,
    pub alpha: f64,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")))
    }
}

/// Upper (1 − α)-quantile of χ²_df.
pub fn chi_square_quantile(df: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let law = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(law.inverse_cdf(1.0 - alpha))
}

/// Decision against the χ²_df law.
pub fn asymptotic_decision(statistic: f64, df: usize, alpha: f64) -> Result<TestResult> {
    let critical_value = chi_square_quantile(df, alpha)?;
    let law = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    let p_value = if statistic <= 0.0 { 1.0 } else { law.sf(statistic).clamp(0.0, 1.0) };
    Ok(TestResult {
        statistic,
        selected_k: None,
        critical_value,
        p_value: Some(p_value),
        reject: statistic > critical_value,
        calibration: CalibrationMethod::Asymptotic,
        alpha,
    })
}

/// Decision against a simulated null sample of the statistic; the p-value is
/// (1 + #{T* ≥ T}) / (R + 1).
pub fn monte_carlo_decision(statistic: f64, null_values: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let mut sorted = null_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let critical_value = mc::empirical_quantile(&sorted, 1.0 - alpha)?;
    let exceed = sorted.iter().filter(|&&v| v >= statistic).count();
    let p_value = (1 + exceed) as f64 / (sorted.len() + 1) as f64;
    Ok(TestResult {
        statistic,
        selected_k: None,
        critical_value,
        p_value: Some(p_value),
        reject: statistic > critical_value,
        calibration: CalibrationMethod::MonteCarlo,
        alpha,
    })
}

/// Evaluates `statistic` on `sample` and decides at level `alpha`.
pub fn run_test(
    statistic: Statistic,
    sample: &DigitSample,
    alpha: f64,
    calibration: Calibration,
    mc: Option<&McSettings>,
) -> Result<TestResult> {
    statistic.validate()?;
    check_alpha(alpha)?;
    let value = statistic.evaluate(sample)?;
    let method = match (calibration, statistic.asymptotic_df()) {
        (Calibration::Asymptotic, None) => {
            return Err(Error::Configuration(format!(
                "{statistic} has no asymptotic calibration"
            )))
        }
        (Calibration::Asymptotic, Some(_)) => CalibrationMethod::Asymptotic,
        (Calibration::MonteCarlo, _) | (Calibration::Auto, None) => CalibrationMethod::MonteCarlo,
        (Calibration::Auto, Some(_)) if sample.n() < AUTO_MC_THRESHOLD => CalibrationMethod::MonteCarlo,
        (Calibration::Auto, Some(_)) => CalibrationMethod::Asymptotic,
    };
    let mut result = match method {
        CalibrationMethod::Asymptotic => {
            asymptotic_decision(value, statistic.asymptotic_df().expect("checked above"), alpha)?
        }
        CalibrationMethod::MonteCarlo => {
            let settings = mc.ok_or_else(|| {
                Error::Configuration(format!("Monte-Carlo calibration of {statistic} needs settings"))
            })?;
            let config = McConfig {
                replications: settings.replications,
                master_seed: settings.master_seed,
                n: sample.n(),
                alpha,
                workers: settings.workers,
            };
            let null = mc::simulate_null(statistic, &config)?;
            monte_carlo_decision(value, &null, alpha)?
        }
    };
    if let Statistic::DataDriven(k_max) = statistic {
        result.selected_k = Some(smooth::data_driven_select(sample, k_max)?.order);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        let mut all = Statistic::full_battery();
        all.extend((1..=7).map(Statistic::Smooth));
        all.extend((1..=7).map(Statistic::DataDriven));
        for s in all {
            assert_eq!(s.id().parse::<Statistic>().unwrap(), s);
        }
        assert_eq!("tk".parse::<Statistic>().unwrap(), Statistic::DataDriven(5));
        for bad in ["T0", "T8", "TK9", "foo", "", "Tx"] {
            assert!(matches!(bad.parse::<Statistic>(), Err(Error::UnknownStatistic(_))), "{bad}");
        }
    }

    #[test]
    fn boundary_is_not_a_rejection() {
        let q = chi_square_quantile(2, 0.05).unwrap();
        assert!((q - 5.991).abs() < 5e-4);
        let r = asymptotic_decision(q, 2, 0.05).unwrap();
        assert!(!r.reject);
        let r = asymptotic_decision(5.991, 2, 0.05).unwrap();
        assert!(!r.reject);
        let r = asymptotic_decision(0.0, 2, 0.3).unwrap();
        assert!(!r.reject);
        assert_eq!(r.p_value, Some(1.0));
    }

    #[test]
    fn alpha_is_validated() {
        assert!(chi_square_quantile(2, 1.5).is_err());
        assert!(chi_square_quantile(2, 0.0).is_err());
        let s = DigitSample::from_counts([10; 9]).unwrap();
        assert!(run_test(Statistic::Pearson, &s, 1.0, Calibration::Asymptotic, None).is_err());
    }

    #[test]
    fn classic_statistics_need_monte_carlo() {
        let s = DigitSample::from_counts([30, 18, 12, 10, 8, 7, 6, 5, 4]).unwrap();
        assert!(matches!(
            run_test(Statistic::Mad, &s, 0.05, Calibration::Asymptotic, None),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            run_test(Statistic::Watson, &s, 0.05, Calibration::Auto, None),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn monte_carlo_p_value() {
        let null: Vec<f64> = (1..=99).map(f64::from).collect();
        let r = monte_carlo_decision(95.5, &null, 0.05).unwrap();
        // Four null values are at least 95.5.
        assert_eq!(r.p_value, Some(5.0 / 100.0));
        assert!((r.critical_value - 94.1).abs() < 1e-12);
        assert!(r.reject);
        let r = monte_carlo_decision(0.0, &null, 0.05).unwrap();
        assert_eq!(r.p_value, Some(1.0));
    }
}
