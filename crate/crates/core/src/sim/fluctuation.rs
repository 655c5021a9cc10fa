//! Distribution of the estimator over dataset resamples at fixed
//! query point(s): the raw material behind the three-regime picture.

use rayon::prelude::*;

use crate::error::Result;
use crate::gaussian::big_d;
use crate::numeric::logsum::CompensatedSum;
use crate::numeric::stats::{hill_tail_fit, TailFit};

use super::{coordinate_eigenvalues, evaluate_density, sample_point, sample_points, ExperimentConfig};

/// Tail-fit protocol: maximum-likelihood Hill estimator on the largest
/// 5% of z-samples, with a hard lower cutoff at z = 3 and at least 200
/// samples required in the window.
const TAIL_TOP_FRACTION: f64 = 0.05;
const TAIL_LOWER_CUTOFF: f64 = 3.0;
const TAIL_MIN_COUNT: usize = 200;

/// Monte-Carlo statistics of ρ̂_h^D(x) across dataset resamples.
#[derive(Debug, Clone)]
pub struct FluctuationSummary {
    pub seed: u64,
    pub alpha: f64,
    /// (1/d) ln ρ̂ per resample.
    pub log_rho_over_d: Vec<f64>,
    /// Theory value of (1/d) ln E_D ρ̂ (= φ at m = 1).
    pub annealed_log_over_d: f64,
    /// Mean of the samples, estimating (1/d) E_D ln ρ̂.
    pub typical_log_over_d: f64,
    /// z = ρ̂ / ρ̂_typ with ρ̂_typ = exp(E_D ln ρ̂).
    pub z: Vec<f64>,
    /// CLT-standardized fluctuations (ρ̂ − mean)/std, computed through z.
    pub g: Vec<f64>,
    /// Stable-law normalization: centered by E_D ρ̂ and rescaled by
    /// exp(E_D ln ρ̂_{h,2}) between the transition lines, uncentered and
    /// rescaled by exp(E_D ln ρ̂_{h,1}) in the condensed phase.
    pub l_stable: Vec<f64>,
    /// Power-law tail fit of z; absent when the window is too thin.
    pub tail: Option<TailFit>,
    pub y2: Vec<f64>,
    pub y3: Vec<f64>,
    pub d_min_sq_over_d: Vec<f64>,
}

/// Resample the dataset `config.num_datasets` times and record the
/// estimator statistics at the query point(s).
///
/// The study fixes one query x when `num_queries` = 1 (the protocol
/// behind the histogram figures); with `num_queries` = q > 1, trial t
/// uses query t mod q, which averages the small x-to-x scatter away
/// (self-averaging check). Each trial draws its dataset from stream
/// (seed, trial), so the run is reproducible under any schedule.
pub fn fluctuation_study(config: &ExperimentConfig) -> Result<FluctuationSummary> {
    config.validate()?;
    let kernel = config.kernel()?;
    let eigenvalues = coordinate_eigenvalues(&config.spectrum, config.d);
    let d = config.d as f64;
    let alpha = config.alpha();

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

    let mut mean_log = CompensatedSum::new();
    let mut mean_log_p2 = CompensatedSum::new();
    for e in &evals {
        mean_log.add(e.log_density);
        mean_log_p2.add(e.log_density_p2);
    }
    let count = evals.len() as f64;
    let mean_log = mean_log.value() / count;
    let mean_log_p2 = mean_log_p2.value() / count;

    let z: Vec<f64> = evals.iter().map(|e| (e.log_density - mean_log).exp()).collect();

    // CLT standardization, scale-free through z
    let mut zm = CompensatedSum::new();
    for &v in &z {
        zm.add(v);
    }
    let z_mean = zm.value() / count;
    let mut zv = CompensatedSum::new();
    for &v in &z {
        zv.add((v - z_mean) * (v - z_mean));
    }
    let z_std = (zv.value() / (count - 1.0)).sqrt();
    let g: Vec<f64> = z.iter().map(|&v| (v - z_mean) / z_std).collect();

    // stable-law normalization per phase
    let condensed = big_d(alpha, config.h, &kernel, &config.spectrum)? > 0.0;
    let l_stable: Vec<f64> = if condensed {
        // ρ̂_{h,1} = ρ̂, so the normalizer is the typical value itself
        z.clone()
    } else {
        let scaled: Vec<f64> = evals
            .iter()
            .map(|e| (e.log_density - mean_log_p2).exp())
            .collect();
        let mut sm = CompensatedSum::new();
        for &v in &scaled {
            sm.add(v);
        }
        let scaled_mean = sm.value() / count;
        scaled.iter().map(|&v| v - scaled_mean).collect()
    };

    let tail = hill_tail_fit(&z, TAIL_TOP_FRACTION, TAIL_LOWER_CUTOFF, TAIL_MIN_COUNT);
    let annealed = crate::gaussian::phi(alpha, config.h, 1.0, &kernel, &config.spectrum)?;

    Ok(FluctuationSummary {
        seed: config.seed,
        alpha,
        log_rho_over_d: evals.iter().map(|e| e.log_density / d).collect(),
        annealed_log_over_d: annealed,
        typical_log_over_d: mean_log / d,
        z,
        g,
        l_stable,
        tail,
        y2: evals.iter().map(|e| e.y2).collect(),
        y3: evals.iter().map(|e| e.y3).collect(),
        d_min_sq_over_d: evals.iter().map(|e| e.u_min).collect(),
    })
}
