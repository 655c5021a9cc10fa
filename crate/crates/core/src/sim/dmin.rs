//! Nearest-neighbour distance statistics and the condensed-phase
//! reconstruction of the estimator from d_min alone.

use rayon::prelude::*;

use crate::error::Result;
use crate::numeric::logsum::CompensatedSum;

use super::{coordinate_eigenvalues, evaluate_density, sample_point, sample_points, ExperimentConfig};

/// Empirical distribution of min_i |x−y_i|²/d together with the
/// single-term reconstruction error of (1/d) ln ρ̂.
#[derive(Debug, Clone)]
pub struct DminStats {
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Mean of [reconstruction − direct] where the reconstruction keeps
    /// only the nearest kernel term: −α − ln h + c_γ − f_γ(d_min²/(d h²)).
    /// Close to zero (from below) in the condensed regime; strongly
    /// negative in the CLT regime where many terms contribute.
    pub reconstruction_gap_mean: f64,
}

/// Sample d_min²/d across dataset resamples at a fixed query point.
pub fn d_min_statistics(config: &ExperimentConfig) -> Result<DminStats> {
    config.validate()?;
    let kernel = config.kernel()?;
    let eigenvalues = coordinate_eigenvalues(&config.spectrum, config.d);
    let alpha = config.alpha();
    let d = config.d as f64;

    let queries: Vec<Vec<f64>> = (0..config.num_queries)
        .map(|i| sample_point(&eigenvalues, &mut config.query_rng(i)))
        .collect();

    let evals: Vec<_> = (0..config.num_datasets)
        .into_par_iter()
        .map(|trial| {
            let mut rng = config.dataset_rng(trial);
            let dataset = sample_points(&eigenvalues, config.n, &mut rng);
            let query = &queries[(trial % config.num_queries) as usize];
            evaluate_density(query, &dataset, config.h, &kernel)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean = CompensatedSum::new();
    let mut gap = CompensatedSum::new();
    for e in &evals {
        mean.add(e.u_min);
        let reconstruction =
            -alpha - config.h.ln() + kernel.c_gamma() - kernel.rate(e.u_min / (config.h * config.h))?;
        gap.add(reconstruction - e.log_density / d);
    }
    let count = evals.len() as f64;
    Ok(DminStats {
        samples: evals.iter().map(|e| e.u_min).collect(),
        mean: mean.value() / count,
        reconstruction_gap_mean: gap.value() / count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectralDensity;

    fn config(h: f64, n: u64, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            d: 51,
            n,
            h,
            gamma: 1.0,
            spectrum: SpectralDensity::identity(),
            num_datasets: trials,
            num_queries: 1,
            seed: 5,
        }
    }

    #[test]
    fn single_point_dataset_has_typical_distance() {
        // n = 1: no minimization, mean d_min²/d → u_typ = 2⟨λ⟩.
        // A fresh query per trial averages out the x-conditional offset
        // (|x|²/d − 1), which at d = 51 would otherwise dominate.
        let mut cfg = config(1.0, 1, 3000);
        cfg.num_queries = cfg.num_datasets;
        let stats = d_min_statistics(&cfg).unwrap();
        let se = (8.0 / 51.0 / 3000.0f64).sqrt(); // var(|x−y|²/d) = 8/d
        assert!(
            (stats.mean - 2.0).abs() < 4.0 * se,
            "mean {} vs 2 (se {se})",
            stats.mean
        );
    }

    #[test]
    fn condensed_reconstruction_is_tight_from_below() {
        let cfg = config(0.9, 164, 1500);
        let stats = d_min_statistics(&cfg).unwrap();
        assert!(stats.reconstruction_gap_mean <= 0.0);
        assert!(
            stats.reconstruction_gap_mean > -0.02,
            "gap {}",
            stats.reconstruction_gap_mean
        );
    }

    #[test]
    fn clt_regime_reconstruction_underestimates() {
        // with many comparable terms the single-term reconstruction
        // misses nearly the full −α = −(ln n)/d budget
        let cfg = config(3.0, 164, 400);
        let stats = d_min_statistics(&cfg).unwrap();
        assert!(
            stats.reconstruction_gap_mean < -0.05,
            "gap {}",
            stats.reconstruction_gap_mean
        );
        assert!(stats.reconstruction_gap_mean > -cfg.alpha());
    }
}
