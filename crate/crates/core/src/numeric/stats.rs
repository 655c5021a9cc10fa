//! Sample statistics shared by the simulators and their tests.

use super::logsum::CompensatedSum;

/// Mean, standard deviation, skewness and excess kurtosis of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the sample mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

pub fn moments(samples: &[f64]) -> Moments {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    let mut s = CompensatedSum::new();
    for &x in samples {
        s.add(x);
    }
    let mean = s.value() / n as f64;
    let (mut m2, mut m3, mut m4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    let m2 = m2.value() / n as f64;
    let m3 = m3.value() / n as f64;
    let m4 = m4.value() / n as f64;
    Moments {
        count: n,
        mean,
        variance: m2 * n as f64 / (n as f64 - 1.0),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    }
}

/// Hill maximum-likelihood estimate of a power-law tail index.
///
/// For samples with P(Z > z) ~ z^{-m}, the estimator runs on the `k`
/// largest values above the threshold (the (k+1)-th largest):
/// m = k / sum_i ln(z_(i) / z_(k+1)).
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub exponent: f64,
    /// Half width of the 95% confidence interval, 1.96 m / sqrt(k).
    pub ci_half_width: f64,
    pub tail_count: usize,
    pub threshold: f64,
}

/// Fit the upper tail of `samples` (unsorted, any order).
///
/// `top_fraction` selects the order statistics entering the fit;
/// values below `lower_cutoff` are excluded even if they fall in the
/// top fraction. Returns `None` when fewer than `min_count` samples
/// survive.
pub fn hill_tail_fit(
    samples: &[f64],
    top_fraction: f64,
    lower_cutoff: f64,
    min_count: usize,
) -> Option<TailFit> {
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|z| z.is_finite()).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k_frac = ((sorted.len() as f64) * top_fraction).floor() as usize;
    let mut k = k_frac.min(sorted.len().saturating_sub(1));
    // honour the lower cutoff: shrink the window until the threshold clears it
    while k > 0 && sorted[k] < lower_cutoff {
        k -= 1;
    }
    if k < min_count {
        return None;
    }
    let threshold = sorted[k];
    if threshold <= 0.0 {
        return None;
    }
    let sum_log: f64 = sorted[..k].iter().map(|&z| (z / threshold).ln()).sum();
    if sum_log <= 0.0 {
        return None;
    }
    let exponent = k as f64 / sum_log;
    Some(TailFit {
        exponent,
        ci_half_width: 1.96 * exponent / (k as f64).sqrt(),
        tail_count: k,
        threshold,
    })
}

/// Kolmogorov-Smirnov distance between a sample and a model CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn moments_of_known_sample() {
        let m = moments(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m.mean - 2.5).abs() < 1e-15);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-14);
        assert!(m.skewness.abs() < 1e-14);
    }

    #[test]
    fn hill_recovers_pareto_index() {
        // Pareto(index 1.5) via inverse transform, seeded.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..200_000)
            .map(|_| {
                let u: f64 = rand::Rng::random(&mut rng);
                (1.0 - u).powf(-1.0 / 1.5)
            })
            .collect();
        let fit = hill_tail_fit(&samples, 0.05, 0.0, 200).unwrap();
        assert!(
            (fit.exponent - 1.5).abs() < 3.0 * fit.ci_half_width / 1.96,
            "hill {} vs 1.5",
            fit.exponent
        );
    }

    #[test]
    fn hill_refuses_thin_windows() {
        assert!(hill_tail_fit(&[1.0, 2.0, 3.0], 0.05, 0.0, 200).is_none());
    }

    #[test]
    fn ks_detects_wrong_and_right_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<f64> = (0..5000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let good = ks_statistic(&samples, crate::numeric::special::normal_cdf);
        let bad = ks_statistic(&samples, |x| crate::numeric::special::normal_cdf(x - 0.5));
        assert!(good < 0.02, "good {good}");
        assert!(bad > 0.15, "bad {bad}");
    }
}
