//! Closed-form approximation of the power of T_K against a fixed alternative.
//!
//! Under an alternative g, the component vector U is approximately normal with
//! mean ν (ν_k = √n Σ_d h_k(d) g(d)) and covariance Σ, so T_K = ‖U‖² behaves
//! like Σ_k λ_k χ²_1(δ_k²) with λ the eigenvalues of Σ and δ = Λ^{-1/2} Pᵀ ν.
//! The tail of that weighted sum is approximated by matching the first four
//! cumulants to a noncentral χ² law.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use statrs::function::gamma::{checked_gamma_ur, ln_gamma};

use crate::benford::{standard_system, Pmf9};
use crate::error::{Error, Result};
use crate::smooth::check_order;
use crate::statistic::{check_alpha, chi_square_quantile};

/// Eigenvalues below this are treated as zero.
const EIGEN_FLOOR: f64 = 1e-10;
/// Largest mean shift tolerated along a dropped direction.
const DROPPED_SHIFT_LIMIT: f64 = 1e-6;
const SERIES_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerProblem {
    pub g: Pmf9,
    pub n: u64,
    pub k: usize,
    pub alpha: f64,
}

impl PowerProblem {
    pub fn validate(&self) -> Result<()> {
        check_order(self.k)?;
        check_alpha(self.alpha)?;
        if self.n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralForm {
    pub nu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    /// Eigenvalues of Σ kept after dropping null directions, descending.
    pub lambda: Vec<f64>,
    /// Orthonormal eigenvectors of Σ as columns, matching `lambda`.
    pub eigenvectors: DMatrix<f64>,
    /// δ = Λ^{-1/2} Pᵀ ν on the kept directions.
    pub delta: Vec<f64>,
    /// Number of directions dropped for a vanishing eigenvalue.
    pub dropped: usize,
}

/// ν and Σ by direct summation over the nine digits.
pub fn mean_and_covariance(problem: &PowerProblem) -> Result<(DVector<f64>, DMatrix<f64>)> {
    problem.validate()?;
    let system = standard_system();
    let g = problem.g.probs();
    let k = problem.k;
    let root_n = (problem.n as f64).sqrt();
    let expectation = |f: &dyn Fn(usize) -> f64| -> f64 { (0..9).map(|d| f(d) * g[d]).sum() };
    let nu = DVector::from_fn(k, |i, _| root_n * expectation(&|d| system.values(i + 1)[d]));
    let n = problem.n as f64;
    let sigma = DMatrix::from_fn(k, k, |i, j| {
        expectation(&|d| system.values(i + 1)[d] * system.values(j + 1)[d]) - nu[i] * nu[j] / n
    });
    Ok((nu, sigma))
}

pub fn spectral_form(problem: &PowerProblem) -> Result<SpectralForm> {
    let (nu, sigma) = mean_and_covariance(problem)?;
    decompose(nu, sigma)
}

/// Eigendecomposition of Σ and the noncentralities δ along its non-null
/// directions. A null direction is dropped when ν has no component along it
/// and is an error otherwise.
pub fn decompose(nu: DVector<f64>, sigma: DMatrix<f64>) -> Result<SpectralForm> {
    let k = nu.len();
    if sigma.nrows() != k || sigma.ncols() != k {
        return Err(Error::Domain("covariance and mean dimensions differ".into()));
    }
    let eigen = SymmetricEigen::new(sigma.clone());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let mut lambda = Vec::with_capacity(k);
    let mut delta = Vec::with_capacity(k);
    let mut columns = Vec::with_capacity(k);
    let mut dropped = 0;
    for idx in order {
        let value = eigen.eigenvalues[idx];
        let vector = eigen.eigenvectors.column(idx).into_owned();
        let shift = vector.dot(&nu);
        if value < -EIGEN_FLOOR {
            return Err(Error::Numerical(format!("covariance has negative eigenvalue {value}")));
        }
        if value < EIGEN_FLOOR {
            if shift.abs() >= DROPPED_SHIFT_LIMIT {
                return Err(Error::Numerical(format!(
                    "mean shift {shift} along a null direction of the covariance"
                )));
            }
            dropped += 1;
            continue;
        }
        lambda.push(value);
        delta.push(shift / value.sqrt());
        columns.push(vector);
    }
    let eigenvectors = if columns.is_empty() {
        DMatrix::zeros(k, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    Ok(SpectralForm {
        nu,
        sigma,
        lambda,
        eigenvectors,
        delta,
        dropped,
    })
}

/// c_i = tr(Σ^i) + i νᵀ Σ^{i-1} ν for i = 1..4, from the matrix form.
pub fn cumulant_sums(sigma: &DMatrix<f64>, nu: &DVector<f64>) -> [f64; 4] {
    let mut power = DMatrix::identity(sigma.nrows(), sigma.ncols());
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let previous = power.clone();
        power = &power * sigma;
        *slot = power.trace() + (i + 1) as f64 * (nu.transpose() * &previous * nu)[(0, 0)];
    }
    out
}

/// c_i = Σ_k λ_k^i (1 + i δ_k²), the same sums from the spectral form.
pub fn spectral_cumulant_sums(lambda: &[f64], delta: &[f64]) -> [f64; 4] {
    std::array::from_fn(|i| {
        let order = (i + 1) as i32;
        lambda
            .iter()
            .zip(delta)
            .map(|(l, d)| l.powi(order) * (1.0 + f64::from(order) * d * d))
            .sum()
    })
}

/// Parameters of the matching noncentral χ² law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentMatch {
    pub c: [f64; 4],
    pub s1: f64,
    pub s2: f64,
    pub a: f64,
    /// Noncentrality d².
    pub d2: f64,
    /// Degrees of freedom ℓ = a² − 2d².
    pub dof: f64,
}

impl MomentMatch {
    pub fn from_cumulant_sums(c: [f64; 4]) -> Result<Self> {
        if !(c[1] > 0.0) {
            return Err(Error::ApproximationFailure(format!("c2 = {} is not positive", c[1])));
        }
        let s1 = c[2] / c[1].powf(1.5);
        let s2 = c[3] / (c[1] * c[1]);
        let a = if s1 * s1 > s2 {
            1.0 / (s1 - (s1 * s1 - s2).sqrt())
        } else {
            1.0 / s1
        };
        let d2 = (s1 * a.powi(3) - a * a).max(0.0);
        let dof = a * a - 2.0 * d2;
        if !(dof > 0.0 && dof.is_finite()) {
            return Err(Error::ApproximationFailure(format!("degrees of freedom {dof} not positive")));
        }
        Ok(Self { c, s1, s2, a, d2, dof })
    }

    /// Approximate P[Q > t]: the χ²_ℓ(d²) tail at a(t − c₁)/√c₂ + ℓ + d².
    pub fn tail(&self, t: f64) -> Result<f64> {
        let threshold = self.a * (t - self.c[0]) / self.c[1].sqrt() + self.dof + self.d2;
        noncentral_chi_square_sf(self.dof, self.d2, threshold)
    }
}

/// P[Σ_k λ_k χ²_1(δ_k²) > t] by four-cumulant matching.
pub fn weighted_chisq_tail(lambda: &[f64], delta: &[f64], t: f64) -> Result<f64> {
    if lambda.len() != delta.len() || lambda.is_empty() {
        return Err(Error::Domain("need matching, nonempty weight and noncentrality vectors".into()));
    }
    if let Some(bad) = lambda.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::Domain(format!("weight {bad} is not positive")));
    }
    MomentMatch::from_cumulant_sums(spectral_cumulant_sums(lambda, delta))?.tail(t)
}

/// Upper tail of the noncentral χ² law with real degrees of freedom, as a
/// Poisson mixture of central upper tails summed outward from the mode.
pub fn noncentral_chi_square_sf(dof: f64, noncentrality: f64, x: f64) -> Result<f64> {
    if !(dof > 0.0) || !(noncentrality >= 0.0) || x.is_nan() {
        return Err(Error::Domain(format!(
            "noncentral chi-square needs dof > 0 and noncentrality >= 0, got {dof}, {noncentrality}"
        )));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let upper = |j: f64| -> Result<f64> {
        checked_gamma_ur(dof / 2.0 + j, x / 2.0).map_err(|e| Error::Numerical(e.to_string()))
    };
    let half = noncentrality / 2.0;
    if half == 0.0 {
        return upper(0.0);
    }
    let weight = |j: f64| (-half + j * half.ln() - ln_gamma(j + 1.0)).exp();
    let mode = half.floor();
    let mut total = 0.0;
    let mut j = mode;
    loop {
        let w = weight(j);
        total += w * upper(j)?;
        // Past the mode the Poisson weights fall off faster than geometrically,
        // so a negligible weight bounds the whole remaining tail.
        if j > mode + 1.0 && w < 1e-18 {
            break;
        }
        if j - mode > 1e6 {
            return Err(Error::Numerical("noncentral chi-square series did not converge".into()));
        }
        j += 1.0;
    }
    let mut j = mode - 1.0;
    while j >= 0.0 {
        let w = weight(j);
        total += w * upper(j)?;
        if w < 1e-300 || (w < SERIES_TOLERANCE * 1e-6 * total && mode - j > 5.0) {
            break;
        }
        j -= 1.0;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Approximate power of T_K at the χ²_K critical value.
pub fn approximate_power(problem: &PowerProblem) -> Result<f64> {
    problem.validate()?;
    let t = chi_square_quantile(problem.k, problem.alpha)?;
    approximate_power_at(problem, t)
}

/// Approximate power of T_K at a supplied critical value, e.g. a Monte-Carlo
/// quantile.
pub fn approximate_power_at(problem: &PowerProblem, threshold: f64) -> Result<f64> {
    let form = spectral_form(problem)?;
    if form.lambda.is_empty() {
        return Err(Error::Numerical("covariance vanishes in every direction".into()));
    }
    weighted_chisq_tail(&form.lambda, &form.delta, threshold)
}
