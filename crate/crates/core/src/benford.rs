//! The Newcomb-Benford first-digit law, its moments, the orthonormal
//! polynomial system it induces on the digits 1..9, and first-significant-digit
//! extraction.

use std::sync::OnceLock;

use dashu_float::DBig;
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of possible first significant digits.
pub const DIGITS: usize = 9;

/// Highest degree of a nondegenerate orthonormal polynomial on a 9-point support.
pub const MAX_CONSTRUCTIBLE_DEGREE: usize = 8;

/// Highest order of smooth statistic supported by the test machinery.
pub const MAX_ORDER: usize = 7;

/// Working precision, in decimal digits, of the polynomial construction.
const CONSTRUCTION_DIGITS: usize = 80;

const PMF_SUM_TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Probability vectors and samples
// ---------------------------------------------------------------------------

/// A probability vector over the digits 1..9 (index 0 holds digit 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pmf9([f64; DIGITS]);

impl Pmf9 {
    /// Validates nonnegativity and unit total mass.
    pub fn new(p: [f64; DIGITS]) -> Result<Self> {
        if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!("probability {bad} is not a nonnegative real")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self(p))
    }

    /// Rescales a nonnegative weight vector to unit mass.
    pub fn normalized(weights: [f64; DIGITS]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Domain(format!("weights sum to {total}")));
        }
        let mut p = weights;
        p.iter_mut().for_each(|v| *v /= total);
        Self::new(p)
    }

    /// All mass on one digit.
    pub fn point_mass(digit: u8) -> Result<Self> {
        let idx = digit_index(digit)?;
        let mut p = [0.0; DIGITS];
        p[idx] = 1.0;
        Ok(Self(p))
    }

    pub fn uniform() -> Self {
        Self([1.0 / DIGITS as f64; DIGITS])
    }

    pub fn probs(&self) -> &[f64; DIGITS] {
        &self.0
    }

    /// Probability of `digit` (1..9).
    pub fn prob(&self, digit: u8) -> f64 {
        self.0[usize::from(digit) - 1]
    }

    /// Cumulative probabilities S*_d, d = 1..9.
    pub fn cdf(&self) -> [f64; DIGITS] {
        let mut acc = 0.0;
        self.0.map(|p| {
            acc += p;
            acc
        })
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Pmf9) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn digit_index(digit: u8) -> Result<usize> {
    if (1..=9).contains(&digit) {
        Ok(usize::from(digit) - 1)
    } else {
        Err(Error::Domain(format!("digit {digit} outside 1..9")))
    }
}

/// First-digit counts of an observed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DigitSample {
    counts: [u64; DIGITS],
    n: u64,
}

impl DigitSample {
    pub fn from_counts(counts: [u64; DIGITS]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self { counts, n })
    }

    /// Tallies a sequence of digits in 1..9.
    pub fn from_digits<I: IntoIterator<Item = u8>>(digits: I) -> Result<Self> {
        let mut counts = [0u64; DIGITS];
        for d in digits {
            counts[digit_index(d)?] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64; DIGITS] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Empirical proportions p̂_d = n_d / n.
    pub fn proportions(&self) -> [f64; DIGITS] {
        let n = self.n as f64;
        self.counts.map(|c| c as f64 / n)
    }

    /// Sample mean of the observed digits.
    pub fn mean_digit(&self) -> f64 {
        let total: u64 = self
            .counts
            .iter()
            .zip(1u64..)
            .map(|(c, d)| c * d)
            .sum();
        total as f64 / self.n as f64
    }

    /// The observations in ascending digit order.
    pub fn expand(&self) -> Vec<u8> {
        self.counts
            .iter()
            .zip(1u8..)
            .flat_map(|(&c, d)| std::iter::repeat_n(d, c as usize))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// The law and its moments
// ---------------------------------------------------------------------------

/// π_d = log₁₀(1 + 1/d).
pub fn benford_pmf() -> Pmf9 {
    static PMF: OnceLock<Pmf9> = OnceLock::new();
    *PMF.get_or_init(|| {
        let mut p = [0.0; DIGITS];
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = (1.0 / (i as f64 + 1.0)).ln_1p() / std::f64::consts::LN_10;
        }
        Pmf9(p)
    })
}

/// μ_k = Σ_d d^k π_d.
pub fn benford_moment(k: u32) -> f64 {
    let moments = high_precision_moments(k as usize);
    moments[k as usize].to_f64().value()
}

// ---------------------------------------------------------------------------
// Orthonormal polynomials
// ---------------------------------------------------------------------------

/// A polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthoPolynomial {
    degree: usize,
    coeffs: Vec<f64>,
}

impl OrthoPolynomial {
    /// Builds a polynomial from ascending coefficients. The leading coefficient
    /// must be strictly positive.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.last() {
            Some(&lead) if coeffs.len() >= 2 && lead > 0.0 => Ok(Self {
                degree: coeffs.len() - 1,
                coeffs,
            }),
            _ => Err(Error::Domain(
                "need degree >= 1 and a positive leading coefficient".into(),
            )),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Constant term first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn eval_polynomial(p: &OrthoPolynomial, x: f64) -> f64 {
    p.eval(x)
}

fn hp(v: u64) -> DBig {
    DBig::from(v).with_precision(CONSTRUCTION_DIGITS).value()
}

fn high_precision_pmf() -> Vec<DBig> {
    let ln10 = hp(10).ln();
    (1..=DIGITS as u64)
        .map(|d| (hp(d + 1) / hp(d)).ln() / &ln10)
        .collect()
}

/// μ_0..=μ_max at construction precision.
fn high_precision_moments(max: usize) -> Vec<DBig> {
    let pmf = high_precision_pmf();
    let mut powers: Vec<DBig> = (1..=DIGITS as u64).map(|_| hp(1)).collect();
    let mut moments = Vec::with_capacity(max + 1);
    for _ in 0..=max {
        let mu = powers
            .iter()
            .zip(pmf.iter())
            .fold(hp(0), |acc, (x, p)| acc + x * p);
        moments.push(mu);
        for (x, d) in powers.iter_mut().zip(1u64..) {
            *x = &*x * hp(d);
        }
    }
    moments
}

fn magnitude(x: &DBig) -> DBig {
    if *x < DBig::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<DBig>>, mut b: Vec<DBig>) -> Result<Vec<DBig>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| magnitude(&a[i][col]).cmp(&magnitude(&a[j][col])))
            .expect("nonempty range");
        if a[pivot][col] == DBig::ZERO {
            return Err(Error::Numerical("singular moment matrix".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = &a[row][col] / &a[col][col];
            for k in col..n {
                let delta = &factor * &a[col][k];
                a[row][k] -= delta;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![hp(0); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

/// Exact-arithmetic-style coefficients of h_1..=h_k_max, kept at
/// construction precision.
fn high_precision_coefficients(k_max: usize) -> Result<Vec<Vec<DBig>>> {
    let mu = high_precision_moments(2 * k_max);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let hankel: Vec<Vec<DBig>> = (0..k)
            .map(|i| (0..k).map(|j| mu[i + j].clone()).collect())
            .collect();
        let rhs: Vec<DBig> = (0..k).map(|i| mu[k + i].clone()).collect();
        let w = solve_dense(hankel, rhs.clone())?;
        let projected = rhs
            .iter()
            .zip(w.iter())
            .fold(hp(0), |acc, (m, x)| acc + m * x);
        let c = &mu[2 * k] - projected;
        if c <= DBig::ZERO {
            return Err(Error::Numerical(format!("nonpositive norm constant at degree {k}")));
        }
        let scale = hp(1) / c.sqrt();
        let mut coeffs: Vec<DBig> = w.iter().map(|x| -(x * &scale)).collect();
        coeffs.push(scale);
        out.push(coeffs);
    }
    Ok(out)
}

/// Builds h_1..=h_k_max, orthonormal with respect to the Benford law, from
/// the moment-matrix construction carried out at 80 significant digits and
/// rounded to `f64` only at the end.
pub fn build_orthonormal_polynomials(k_max: usize) -> Result<Vec<OrthoPolynomial>> {
    if !(1..=MAX_CONSTRUCTIBLE_DEGREE).contains(&k_max) {
        return Err(Error::Domain(format!(
            "polynomial degree {k_max} outside 1..={MAX_CONSTRUCTIBLE_DEGREE}"
        )));
    }
    high_precision_coefficients(k_max)?
        .into_iter()
        .map(|c| OrthoPolynomial::from_coeffs(c.iter().map(|v| v.to_f64().value()).collect()))
        .collect()
}

/// The standard system h_1..h_7 together with a table of h_k(d), each entry
/// evaluated at construction precision.
#[derive(Debug, Clone)]
pub struct OrthonormalSystem {
    polynomials: Vec<OrthoPolynomial>,
    table: Vec<[f64; DIGITS]>,
}

impl OrthonormalSystem {
    fn build(k_max: usize) -> Result<Self> {
        let coeffs = high_precision_coefficients(k_max)?;
        let table = coeffs
            .iter()
            .map(|c| {
                let mut row = [0.0; DIGITS];
                for (slot, d) in row.iter_mut().zip(1u64..) {
                    let x = hp(d);
                    let v = c.iter().rev().fold(hp(0), |acc, ci| acc * &x + ci);
                    *slot = v.to_f64().value();
                }
                row
            })
            .collect();
        let polynomials = coeffs
            .into_iter()
            .map(|c| OrthoPolynomial::from_coeffs(c.iter().map(|v| v.to_f64().value()).collect()))
            .collect::<Result<_>>()?;
        Ok(Self { polynomials, table })
    }

    pub fn max_degree(&self) -> usize {
        self.polynomials.len()
    }

    /// h_k for k ≥ 1.
    pub fn polynomial(&self, k: usize) -> &OrthoPolynomial {
        &self.polynomials[k - 1]
    }

    pub fn polynomials(&self) -> &[OrthoPolynomial] {
        &self.polynomials
    }

    /// h_k(d) for digits 1..9 (index 0 holds digit 1).
    pub fn values(&self, k: usize) -> &[f64; DIGITS] {
        &self.table[k - 1]
    }
}

/// Shared h_1..h_7.
pub fn standard_system() -> &'static OrthonormalSystem {
    static SYSTEM: OnceLock<OrthonormalSystem> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        OrthonormalSystem::build(MAX_ORDER).expect("the Benford moment matrices are nonsingular")
    })
}

// ---------------------------------------------------------------------------
// First significant digit
// ---------------------------------------------------------------------------

/// How the sign of an observation is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignPolicy {
    /// Only strictly positive values are valid.
    #[default]
    Strict,
    /// Any nonzero value is valid; its absolute value is used.
    Absolute,
}

/// A raw observation: either a binary float or a decimal literal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation<'a> {
    Number(f64),
    Text(&'a str),
}

impl From<f64> for Observation<'_> {
    fn from(x: f64) -> Self {
        Observation::Number(x)
    }
}

impl<'a> From<&'a str> for Observation<'a> {
    fn from(s: &'a str) -> Self {
        Observation::Text(s)
    }
}

/// Leading nonzero decimal digit of an observation.
pub fn first_significant_digit<'a>(x: impl Into<Observation<'a>>, sign: SignPolicy) -> Result<u8> {
    match x.into() {
        Observation::Number(v) => first_digit_of_float(v, sign),
        Observation::Text(s) => first_digit_of_literal(s, sign),
    }
}

fn first_digit_of_float(x: f64, sign: SignPolicy) -> Result<u8> {
    if !x.is_finite() {
        return Err(Error::InvalidObservation(format!("{x} is not finite")));
    }
    if x == 0.0 {
        return Err(Error::InvalidObservation("zero has no significant digit".into()));
    }
    if x < 0.0 && sign == SignPolicy::Strict {
        return Err(Error::InvalidObservation(format!("{x} is not positive")));
    }
    // Shortest round-trip scientific form: the first character is the digit.
    let repr = format!("{:e}", x.abs());
    Ok(repr.as_bytes()[0] - b'0')
}

/// Scans a decimal literal `[+-]? (digits [. digits*] | . digits) ([eE] [+-]? digits)?`
/// without converting it to binary.
fn first_digit_of_literal(raw: &str, sign: SignPolicy) -> Result<u8> {
    let s = raw.trim();
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut negative = false;
    if let Some(&c) = bytes.first() {
        if c == b'+' || c == b'-' {
            negative = c == b'-';
            i = 1;
        }
    }
    let mut leading = None;
    let mut mantissa_digits = 0;
    let mut seen_point = false;
    while i < bytes.len() {
        match bytes[i] {
            c @ b'0'..=b'9' => {
                mantissa_digits += 1;
                if leading.is_none() && c != b'0' {
                    leading = Some(c - b'0');
                }
            }
            b'.' if !seen_point => seen_point = true,
            _ => break,
        }
        i += 1;
    }
    if mantissa_digits == 0 {
        return Err(Error::Parse(raw.to_string()));
    }
    if i < bytes.len() {
        if bytes[i] != b'e' && bytes[i] != b'E' {
            return Err(Error::Parse(raw.to_string()));
        }
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start || i != bytes.len() {
            return Err(Error::Parse(raw.to_string()));
        }
    }
    let digit = leading
        .ok_or_else(|| Error::InvalidObservation(format!("{raw:?} is zero")))?;
    if negative && sign == SignPolicy::Strict {
        return Err(Error::InvalidObservation(format!("{raw:?} is not positive")));
    }
    Ok(digit)
}

/// Treatment of records that do not yield a first digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DigitPolicy {
    /// Positive values only; zero and negative values are skipped and
    /// counted, unparseable records are an error.
    #[default]
    Strict,
    /// Absolute values; zeros are skipped and counted, unparseable records
    /// are an error.
    Absolute,
    /// Positive values only; every invalid or unparseable record is skipped
    /// and counted.
    SkipInvalid,
}

impl DigitPolicy {
    fn sign(self) -> SignPolicy {
        match self {
            DigitPolicy::Absolute => SignPolicy::Absolute,
            DigitPolicy::Strict | DigitPolicy::SkipInvalid => SignPolicy::Strict,
        }
    }
}

/// Result of tabulating raw records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tabulation {
    pub sample: DigitSample,
    pub skipped: usize,
}

pub fn tabulate_digits<'a, I, T>(values: I, policy: DigitPolicy) -> Result<Tabulation>
where
    I: IntoIterator<Item = T>,
    T: Into<Observation<'a>>,
{
    let mut counts = [0u64; DIGITS];
    let mut skipped = 0;
    for value in values {
        match first_significant_digit(value, policy.sign()) {
            Ok(d) => counts[usize::from(d) - 1] += 1,
            Err(Error::InvalidObservation(_)) => skipped += 1,
            Err(Error::Parse(_)) if policy == DigitPolicy::SkipInvalid => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let sample = DigitSample::from_counts(counts)?;
    Ok(Tabulation { sample, skipped })
}
