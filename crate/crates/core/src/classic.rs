//! Competitor statistics: Pearson's χ², the discrete Cramér-von Mises,
//! Watson and Anderson-Darling statistics, Kolmogorov's statistic, the
//! proportion-deviation measures m, d and MAD, and the mean-digit statistic a*.
//!
//! Every function depends on the sample only through its digit frequencies,
//! so each accepts anything implementing [`Frequencies`].

use serde::Serialize;

use crate::benford::{benford_pmf, DigitSample, DIGITS};

/// Mean digit under the Benford law, as used by the a* statistic.
pub const A_STAR_CENTER: f64 = 3.44027;
/// Normalizer of a*: 9 − 3.44027.
pub const A_STAR_SCALE: f64 = 5.55973;

/// Source of digit proportions and a sample size.
pub trait Frequencies {
    fn size(&self) -> f64;
    fn proportions(&self) -> [f64; DIGITS];
}

impl Frequencies for DigitSample {
    fn size(&self) -> f64 {
        self.n() as f64
    }

    fn proportions(&self) -> [f64; DIGITS] {
        DigitSample::proportions(self)
    }
}

/// Real-valued counts, for exercising the statistics at exact fits that no
/// integer sample can reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealCounts(pub [f64; DIGITS]);

impl RealCounts {
    /// Counts n·π_d for a sample size n.
    pub fn benford(n: f64) -> Self {
        Self(benford_pmf().probs().map(|p| p * n))
    }
}

impl Frequencies for RealCounts {
    fn size(&self) -> f64 {
        self.0.iter().sum()
    }

    fn proportions(&self) -> [f64; DIGITS] {
        let n = self.size();
        self.0.map(|c| c / n)
    }
}

/// Empirical and Benford cumulative distributions with the discrete weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativePair {
    pub s_hat: [f64; DIGITS],
    pub s_star: [f64; DIGITS],
    /// Z_d = S_d − S*_d.
    pub z: [f64; DIGITS],
    /// t_d = (π_d + π_{d+1})/2, wrapping to π_1 at d = 9.
    pub t: [f64; DIGITS],
}

impl CumulativePair {
    pub fn new(sample: &impl Frequencies) -> Self {
        let pi = benford_pmf();
        let p = pi.probs();
        let mut s_hat = sample.proportions();
        let mut acc = 0.0;
        for v in s_hat.iter_mut() {
            acc += *v;
            *v = acc;
        }
        let s_star = pi.cdf();
        let z = std::array::from_fn(|d| s_hat[d] - s_star[d]);
        let t = std::array::from_fn(|d| (p[d] + p[(d + 1) % DIGITS]) / 2.0);
        Self { s_hat, s_star, z, t }
    }
}

fn deviations(sample: &impl Frequencies) -> [f64; DIGITS] {
    let p = benford_pmf();
    let phat = sample.proportions();
    std::array::from_fn(|d| phat[d] - p.probs()[d])
}

/// Σ_d (n_d − nπ_d)² / (nπ_d); asymptotically χ²_8 under the null.
pub fn pearson_chi_square(sample: &impl Frequencies) -> f64 {
    let n = sample.size();
    let pi = benford_pmf();
    deviations(sample)
        .iter()
        .zip(pi.probs().iter())
        .map(|(dev, p)| n * dev * dev / p)
        .sum()
}

/// W² = n Σ_d Z_d² t_d.
pub fn cramer_von_mises(sample: &impl Frequencies) -> f64 {
    let c = CumulativePair::new(sample);
    sample.size() * c.z.iter().zip(c.t.iter()).map(|(z, t)| z * z * t).sum::<f64>()
}

/// U² = n Σ_d (Z_d − Z̄)² t_d with Z̄ = Σ_d Z_d t_d.
pub fn watson(sample: &impl Frequencies) -> f64 {
    let c = CumulativePair::new(sample);
    let zbar: f64 = c.z.iter().zip(c.t.iter()).map(|(z, t)| z * t).sum();
    sample.size()
        * c.z
            .iter()
            .zip(c.t.iter())
            .map(|(z, t)| (z - zbar).powi(2) * t)
            .sum::<f64>()
}

/// A² = n Σ_{d≤8} Z_d² t_d / (S*_d (1 − S*_d)).
pub fn anderson_darling(sample: &impl Frequencies) -> f64 {
    let c = CumulativePair::new(sample);
    let sum: f64 = (0..DIGITS - 1)
        .map(|d| c.z[d].powi(2) * c.t[d] / (c.s_star[d] * (1.0 - c.s_star[d])))
        .sum();
    sample.size() * sum
}

/// K = √n max_d |S_d − S*_d|.
pub fn kolmogorov(sample: &impl Frequencies) -> f64 {
    let c = CumulativePair::new(sample);
    sample.size().sqrt() * c.z.iter().fold(0.0, |m, z| f64::max(m, z.abs()))
}

/// m = max_d |p̂_d − π_d|.
pub fn max_deviation_m(sample: &impl Frequencies) -> f64 {
    deviations(sample).iter().fold(0.0, |m, v| f64::max(m, v.abs()))
}

/// d = (Σ_d (p̂_d − π_d)²)^{1/2}.
pub fn euclidean_d(sample: &impl Frequencies) -> f64 {
    deviations(sample).iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// MAD = (1/9) Σ_d |p̂_d − π_d|.
pub fn mad(sample: &impl Frequencies) -> f64 {
    deviations(sample).iter().map(|v| v.abs()).sum::<f64>() / DIGITS as f64
}

/// a* = |D̄ − 3.44027| / 5.55973 with D̄ the mean digit.
pub fn a_star(sample: &impl Frequencies) -> f64 {
    let mean: f64 = sample
        .proportions()
        .iter()
        .zip(1..)
        .map(|(p, d)| p * f64::from(d))
        .sum();
    (mean - A_STAR_CENTER).abs() / A_STAR_SCALE
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(c: [u64; 9]) -> DigitSample {
        DigitSample::from_counts(c).unwrap()
    }

    #[test]
    fn perfect_fit_gives_zero() {
        let exact = RealCounts::benford(1000.0);
        let all: [fn(&RealCounts) -> f64; 8] = [
            pearson_chi_square,
            cramer_von_mises,
            watson,
            anderson_darling,
            kolmogorov,
            max_deviation_m,
            euclidean_d,
            mad,
        ];
        for f in all {
            assert!(f(&exact).abs() < 1e-12);
        }
        // The mean digit of the law is 3.440237, so a* is only near zero.
        assert!(a_star(&exact) < 1e-5);
    }

    #[test]
    fn pearson_examples() {
        // 80-digit reference for one observation per digit.
        let s = sample([1; 9]);
        assert!((pearson_chi_square(&s) - 3.615_284_636_209_622).abs() < 1e-12);
        let c = [30, 18, 12, 10, 8, 7, 6, 5, 4];
        let doubled = c.map(|v| v * 2);
        assert!((pearson_chi_square(&sample(doubled)) - 2.0 * pearson_chi_square(&sample(c))).abs() < 1e-12);
    }

    #[test]
    fn cramer_von_mises_all_ones() {
        let s = sample([17, 0, 0, 0, 0, 0, 0, 0, 0]);
        let c = CumulativePair::new(&s);
        let expected: f64 = 17.0 * c.t.iter().zip(c.s_star.iter()).map(|(t, s)| t * (1.0 - s).powi(2)).sum::<f64>();
        assert!((cramer_von_mises(&s) - expected).abs() < 1e-12);
    }

    #[test]
    fn cumulative_pair_invariants() {
        let c = CumulativePair::new(&sample([3, 0, 2, 5, 0, 1, 0, 0, 4]));
        assert!((c.s_hat[8] - 1.0).abs() < 1e-12 && (c.s_star[8] - 1.0).abs() < 1e-12);
        assert!(c.s_hat.windows(2).all(|w| w[0] <= w[1]));
        assert!(c.s_star.windows(2).all(|w| w[0] <= w[1]));
        assert!((c.t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p = benford_pmf();
        assert!((c.t[8] - (p.prob(9) + p.prob(1)) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_all_nines() {
        let s = sample([0, 0, 0, 0, 0, 0, 0, 0, 4]);
        assert!((kolmogorov(&s) - 1.908_485_018_878_65).abs() < 1e-12);
        // Fixed proportions: K scales as √n.
        let s4 = sample([0, 0, 0, 0, 0, 0, 0, 0, 16]);
        assert!((kolmogorov(&s4) - 2.0 * kolmogorov(&s)).abs() < 1e-12);
    }

    #[test]
    fn deviation_examples() {
        let s = sample([100, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert!((max_deviation_m(&s) - 0.698_970_004_336_018_8).abs() < 1e-12);
    }

    #[test]
    fn a_star_examples() {
        assert!((a_star(&sample([0, 0, 0, 0, 0, 0, 0, 0, 7])) - 1.0).abs() < 1e-12);
        assert!((a_star(&sample([5, 0, 0, 0, 0, 0, 0, 0, 0])) - 0.438_918_796_416_372_7).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn counts() -> impl Strategy<Value = [u64; 9]> {
            proptest::array::uniform9(0u64..80).prop_filter("nonempty", |c| c.iter().sum::<u64>() > 0)
        }

        proptest! {
            #[test]
            fn norm_and_ordering_inequalities(c in counts()) {
                let s = sample(c);
                let (m, d, a) = (max_deviation_m(&s), euclidean_d(&s), mad(&s));
                prop_assert!(m <= d + 1e-15 && d <= 3.0 * m + 1e-15);
                prop_assert!(a <= m + 1e-15);
                prop_assert!(watson(&s) <= cramer_von_mises(&s) + 1e-12);
                for v in [pearson_chi_square(&s), cramer_von_mises(&s), watson(&s), anderson_darling(&s), kolmogorov(&s), a_star(&s)] {
                    prop_assert!(v >= 0.0);
                }
                prop_assert!(a_star(&s) <= 1.0 + 1e-12);
            }

            #[test]
            fn anderson_darling_terms_dominate(c in counts()) {
                let s = sample(c);
                let cp = CumulativePair::new(&s);
                for d in 0..8 {
                    let w = cp.z[d].powi(2) * cp.t[d];
                    let a = w / (cp.s_star[d] * (1.0 - cp.s_star[d]));
                    prop_assert!(a >= 4.0 * w - 1e-15);
                }
            }

            #[test]
            fn watson_ignores_a_common_shift(c in counts(), shift in -0.5f64..0.5) {
                let s = sample(c);
                let cp = CumulativePair::new(&s);
                let centered = |z: &[f64; 9]| {
                    let zbar: f64 = z.iter().zip(cp.t.iter()).map(|(z, t)| z * t).sum();
                    z.iter().zip(cp.t.iter()).map(|(z, t)| (z - zbar).powi(2) * t).sum::<f64>()
                };
                let shifted = cp.z.map(|z| z + shift);
                prop_assert!((centered(&cp.z) - centered(&shifted)).abs() < 1e-12);
                prop_assert!((s.n() as f64 * centered(&cp.z) - watson(&s)).abs() < 1e-10);
            }
        }
    }
}
