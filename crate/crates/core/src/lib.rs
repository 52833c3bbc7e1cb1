//! Smooth goodness-of-fit tests for the Newcomb-Benford first-digit law.
//!
//! The crate provides the orthonormal polynomial system of the law, the
//! smooth statistics T_K and the data-driven T_K̂, a battery of competing
//! statistics, parametric alternative families, a deterministic Monte-Carlo
//! engine for critical values and power, and an analytic power approximation
//! for T_K.
//!
//! ```
//! use benford_smooth::{benford::DigitSample, smooth, statistic::Calibration};
//!
//! let sample = DigitSample::from_counts([301, 176, 125, 97, 79, 67, 58, 51, 46]).unwrap();
//! let result = smooth::smooth_test(&sample, 2, 0.05, Calibration::Asymptotic, None).unwrap();
//! assert!(!result.reject);
//! ```

pub mod alternatives;
pub mod benford;
pub mod classic;
pub mod error;
pub mod mc;
pub mod power;
pub mod smooth;
pub mod statistic;

pub use error::{Error, Result};
