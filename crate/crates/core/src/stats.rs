//! Small statistical helpers shared by the verification paths: sample
//! moments, a one-sample Kolmogorov–Smirnov test against an exponential
//! law, and Pearson's chi-square statistic for category counts.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample variance.
pub fn variance(samples: &[f64]) -> f64 {
    let m = mean(samples);
    samples.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (samples.len() - 1) as f64
}

/// Pearson correlation of two equally long sample vectors.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ma, mb) = (mean(a), mean(b));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// Supremum distance between empirical and reference CDF.
    pub statistic: f64,
    /// Asymptotic p-value (Kolmogorov distribution with the
    /// `sqrt(n) + 0.12 + 0.11/sqrt(n)` finite-sample correction).
    pub p_value: f64,
}

/// One-sample KS test of `samples` against `Exp(mean)` (CDF `1 - e^{-x/mean}`).
pub fn ks_test_exponential(samples: &[f64], mean: f64) -> KsResult {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = 1.0 - (-x / mean).exp();
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d),
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(t) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2)`.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Chi-square statistic of observed counts against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn ks_accepts_true_exponential() {
        let mut rng = crate::rng::SeedTree::new(1).stream(crate::rng::Purpose::McTrialBlock, &[0]);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| -2.5 * (1.0 - rng.random::<f64>()).ln())
            .collect();
        let r = ks_test_exponential(&samples, 2.5);
        assert!(r.p_value > 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn ks_rejects_wrong_mean() {
        let mut rng = crate::rng::SeedTree::new(2).stream(crate::rng::Purpose::McTrialBlock, &[0]);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| -2.5 * (1.0 - rng.random::<f64>()).ln())
            .collect();
        let r = ks_test_exponential(&samples, 3.2);
        assert!(r.p_value < 1e-6, "p = {}", r.p_value);
    }

    #[test]
    fn kolmogorov_sf_known_points() {
        // Q(0.8276) ~ 0.5; table value for the Kolmogorov distribution.
        assert!((kolmogorov_sf(0.8276) - 0.5).abs() < 1e-3);
        assert!(kolmogorov_sf(10.0) < 1e-12);
    }

    #[test]
    fn chi_square_of_perfectly_uniform_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[100, 100, 100, 100]), 0.0);
    }
}
