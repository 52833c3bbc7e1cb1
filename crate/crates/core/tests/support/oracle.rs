//! Brute-force reference implementations working on the list of observed
//! digits, sharing no code with the library beyond the polynomial
//! coefficients.

#![allow(dead_code)]

use benford_smooth::benford::{build_orthonormal_polynomials, DigitSample};

pub fn pi(d: usize) -> f64 {
    (1.0 + 1.0 / d as f64).log10()
}

fn observations(sample: &DigitSample) -> Vec<usize> {
    sample.expand().into_iter().map(usize::from).collect()
}

fn share(obs: &[usize], keep: impl Fn(usize) -> bool) -> f64 {
    obs.iter().filter(|&&x| keep(x)).count() as f64 / obs.len() as f64
}

/// Z_d = S_d − S*_d with S_d the share of observations ≤ d.
fn z(obs: &[usize], d: usize) -> f64 {
    share(obs, |x| x <= d) - (1..=d).map(pi).sum::<f64>()
}

fn t(d: usize) -> f64 {
    let next = if d == 9 { 1 } else { d + 1 };
    (pi(d) + pi(next)) / 2.0
}

pub fn pearson(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    let n = obs.len() as f64;
    (1..=9)
        .map(|d| {
            let count = obs.iter().filter(|&&x| x == d).count() as f64;
            (count - n * pi(d)).powi(2) / (n * pi(d))
        })
        .sum()
}

pub fn cramer_von_mises(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    obs.len() as f64 * (1..=9).map(|d| z(&obs, d).powi(2) * t(d)).sum::<f64>()
}

pub fn watson(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    let zbar: f64 = (1..=9).map(|d| z(&obs, d) * t(d)).sum();
    obs.len() as f64 * (1..=9).map(|d| (z(&obs, d) - zbar).powi(2) * t(d)).sum::<f64>()
}

pub fn anderson_darling(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    let total: f64 = (1..=8)
        .map(|d| {
            let s: f64 = (1..=d).map(pi).sum();
            z(&obs, d).powi(2) * t(d) / (s * (1.0 - s))
        })
        .sum();
    obs.len() as f64 * total
}

pub fn kolmogorov(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    let worst = (1..=9).map(|d| z(&obs, d).abs()).fold(0.0, f64::max);
    (obs.len() as f64).sqrt() * worst
}

fn deviations(sample: &DigitSample) -> Vec<f64> {
    let obs = observations(sample);
    (1..=9).map(|d| share(&obs, |x| x == d) - pi(d)).collect()
}

pub fn max_deviation(sample: &DigitSample) -> f64 {
    deviations(sample).iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn euclidean(sample: &DigitSample) -> f64 {
    deviations(sample).iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn mad(sample: &DigitSample) -> f64 {
    deviations(sample).iter().map(|v| v.abs()).sum::<f64>() / 9.0
}

pub fn a_star(sample: &DigitSample) -> f64 {
    let obs = observations(sample);
    let mean = obs.iter().sum::<usize>() as f64 / obs.len() as f64;
    (mean - 3.44027).abs() / 5.55973
}

/// All nine classic statistics in the library's battery order:
/// χ², W², U², A², K, m, d, MAD, a*.
pub fn classic(sample: &DigitSample) -> [f64; 9] {
    [
        pearson(sample),
        cramer_von_mises(sample),
        watson(sample),
        anderson_darling(sample),
        kolmogorov(sample),
        max_deviation(sample),
        euclidean(sample),
        mad(sample),
        a_star(sample),
    ]
}

/// T_1..T_k from U_j = n^{-1/2} Σ_i h_j(D_i), evaluating the polynomials on
/// each observation.
pub fn smooth_partial_sums(sample: &DigitSample, k: usize) -> Vec<f64> {
    let polys = build_orthonormal_polynomials(k).unwrap();
    let obs = observations(sample);
    let root_n = (obs.len() as f64).sqrt();
    let mut acc = 0.0;
    polys
        .iter()
        .map(|h| {
            let u = obs.iter().map(|&x| h.eval(x as f64)).sum::<f64>() / root_n;
            acc += u * u;
            acc
        })
        .collect()
}
