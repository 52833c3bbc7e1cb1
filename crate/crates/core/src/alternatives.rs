//! Parametric families of first-digit laws that nest the Benford law, and a
//! deterministic categorical sampler.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benford::{benford_pmf, DigitSample, Pmf9, DIGITS};
use crate::error::{Error, Result};

/// Half-width of the neighbourhood routed to an exact branch at a removable
/// singularity.
const SINGULARITY_WIDTH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rodriguez,
    Pietronero,
    Hurlimann,
    Mixture,
    Contaminated1,
    Contaminated2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Rodriguez,
        Family::Pietronero,
        Family::Hurlimann,
        Family::Mixture,
        Family::Contaminated1,
        Family::Contaminated2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rodriguez => "rodriguez",
            Family::Pietronero => "pietronero",
            Family::Hurlimann => "hurlimann",
            Family::Mixture => "mixture",
            Family::Contaminated1 => "contaminated1",
            Family::Contaminated2 => "contaminated2",
        }
    }

    /// Parameter value at which the family reduces to the Benford law.
    pub fn null_parameter(self) -> f64 {
        match self {
            Family::Rodriguez => -1.0,
            Family::Pietronero | Family::Hurlimann => 1.0,
            Family::Mixture | Family::Contaminated1 => 0.0,
            Family::Contaminated2 => -2.0,
        }
    }

    /// Admissible parameter interval (bounds inclusive unless noted).
    pub fn domain(self) -> (f64, f64) {
        match self {
            Family::Rodriguez | Family::Pietronero => (f64::NEG_INFINITY, f64::INFINITY),
            // Open at zero: 0^β is undefined for β ≤ 0.
            Family::Hurlimann => (0.0, f64::INFINITY),
            Family::Mixture => (0.0, 1.0),
            Family::Contaminated1 => (0.0, 0.6),
            Family::Contaminated2 => (-2.0, f64::INFINITY),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown family {s:?}")))
    }
}

/// A member of one family. For `Contaminated2` the parameter is γ, mapped
/// internally to β = 0.001(1 + γ/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    pub family: Family,
    pub beta: f64,
}

impl AlternativeSpec {
    pub fn new(family: Family, beta: f64) -> Result<Self> {
        let spec = Self { family, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.family.domain();
        let ok = self.beta.is_finite()
            && match self.family {
                Family::Hurlimann => self.beta > lo,
                _ => self.beta >= lo && self.beta <= hi,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "parameter {} outside the {} domain",
                self.beta, self.family
            )))
        }
    }
}

/// ((x+1)^s − x^s) / (10^s − 1), evaluated without overflow or cancellation
/// for s near zero or of large magnitude.
fn power_difference_ratio(x: f64, s: f64) -> f64 {
    let ln10 = std::f64::consts::LN_10;
    if s * ln10 > 50.0 {
        (((x + 1.0) / 10.0).powf(s) - (x / 10.0).powf(s)) / (1.0 - 10f64.powf(-s))
    } else {
        x.powf(s) * (s * (1.0 / x).ln_1p()).exp_m1() / (s * ln10).exp_m1()
    }
}

fn rodriguez(beta: f64) -> [f64; DIGITS] {
    if (beta + 1.0).abs() < SINGULARITY_WIDTH {
        return *benford_pmf().probs();
    }
    std::array::from_fn(|i| {
        let x = i as f64 + 1.0;
        if beta.abs() < SINGULARITY_WIDTH {
            // Stigler's law.
            (1.0 + 10.0 / 9.0 * 10f64.ln() + x * x.ln() - (x + 1.0) * (x + 1.0).ln()) / 9.0
        } else if beta.abs() < 0.5 {
            // The direct form loses digits to cancellation near β = 0. Writing
            // (x+1)^s, x^s and 10^s with s = 1 + β through expm1 removes the
            // constant terms that cancel exactly.
            let numerator = 9.0 * (x + 1.0) * (beta * (x + 1.0).ln()).exp_m1()
                - 9.0 * x * (beta * x.ln()).exp_m1()
                - 10.0 * (beta * std::f64::consts::LN_10).exp_m1();
            let denominator = 9.0 * beta * (10f64.powf(beta + 1.0) - 1.0);
            1.0 / 9.0 - numerator / denominator
        } else {
            (beta + 1.0) / (9.0 * beta) - power_difference_ratio(x, beta + 1.0) / beta
        }
    })
}

fn pietronero(beta: f64) -> [f64; DIGITS] {
    if (beta - 1.0).abs() < SINGULARITY_WIDTH {
        return *benford_pmf().probs();
    }
    std::array::from_fn(|i| power_difference_ratio(i as f64 + 1.0, 1.0 - beta))
}

fn hurlimann(beta: f64) -> [f64; DIGITS] {
    std::array::from_fn(|i| {
        let x = i as f64 + 1.0;
        let lo = x.log10();
        let hi = (x + 1.0).log10();
        0.5 * (hi.powf(beta) - lo.powf(beta) - (1.0 - hi).powf(beta) + (1.0 - lo).powf(beta))
    })
}

/// Probabilities of one family member.
pub fn alternative_pmf(spec: &AlternativeSpec) -> Result<Pmf9> {
    spec.validate()?;
    let pi = *benford_pmf().probs();
    let beta = spec.beta;
    let p: [f64; DIGITS] = match spec.family {
        Family::Rodriguez => rodriguez(beta),
        Family::Pietronero => pietronero(beta),
        Family::Hurlimann => hurlimann(beta),
        Family::Mixture => pi.map(|p| (1.0 - beta) * p + beta / DIGITS as f64),
        Family::Contaminated1 => std::array::from_fn(|i| match i {
            0 | 8 => (pi[i] + beta) / (1.0 + 2.0 * beta),
            _ => pi[i] / (1.0 + 2.0 * beta),
        }),
        Family::Contaminated2 => {
            let b = 0.001 * (1.0 + beta / 2.0);
            std::array::from_fn(|i| {
                let excess = (i + 1).saturating_sub(5) as f64;
                (pi[i] + excess * b) / (1.0 + 10.0 * b)
            })
        }
    };
    // Rounding can leave tiny negative values in the large-|β| tails.
    let p = p.map(|v| if v < 0.0 && v > -1e-15 { 0.0 } else { v });
    Pmf9::new(p).map_err(|e| Error::Numerical(format!("{} at {}: {e}", spec.family, beta)))
}

/// Inverse-CDF sampler over the digits 1..9.
#[derive(Debug, Clone)]
pub struct DigitSampler {
    cumulative: [f64; DIGITS],
}

impl DigitSampler {
    pub fn new(pmf: &Pmf9) -> Self {
        let mut cumulative = pmf.cdf();
        // Mass beyond the last positive digit is unreachable.
        let last = pmf.probs().iter().rposition(|&p| p > 0.0).unwrap_or(DIGITS - 1);
        for c in cumulative[last..].iter_mut() {
            *c = f64::INFINITY;
        }
        Self { cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        let u: f64 = rng.random();
        let idx = self.cumulative.iter().position(|&c| u < c).unwrap_or(DIGITS - 1);
        idx as u8 + 1
    }

    /// Tallies `n` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<DigitSample> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut counts = [0u64; DIGITS];
        for _ in 0..n {
            counts[usize::from(self.draw(rng)) - 1] += 1;
        }
        DigitSample::from_counts(counts)
    }
}

pub fn sample_digits<R: Rng + ?Sized>(pmf: &Pmf9, n: u64, rng: &mut R) -> Result<DigitSample> {
    DigitSampler::new(pmf).sample(n, rng)
}
