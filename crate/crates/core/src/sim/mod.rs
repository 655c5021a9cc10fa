//! Monte-Carlo engine for the actual KDE experiment: Gaussian datasets,
//! log-domain evaluation of the estimator, fluctuation histograms, tail
//! fits, participation ratios, nearest-distance statistics and the
//! empirical KL protocol.
//!
//! Reproducibility contract: every random quantity is drawn from a
//! counter-based ChaCha8 generator keyed by the experiment seed, with
//! one stream per independent work unit (dataset resample or query
//! point). Parallel execution therefore yields bit-identical results
//! regardless of thread count or schedule, and aggregations run in a
//! fixed order with compensated summation.

mod dataset;
mod density;
mod dmin;
mod ekl;
mod fluctuation;

pub use dataset::{coordinate_eigenvalues, sample_point, sample_points};
pub use density::{evaluate_density, log_density_at, DensityEval};
pub use dmin::{d_min_statistics, DminStats};
pub use ekl::{empirical_kl, EmpiricalKlEstimate, EmpiricalKlProtocol};
pub use fluctuation::{fluctuation_study, FluctuationSummary};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GammaKernel;
use crate::spectrum::SpectralDensity;

/// Cap on resident dataset size (elements), one dataset at a time.
pub const DATASET_ELEMENT_CAP: u64 = 1 << 27;

/// Stream ids: datasets and queries live in disjoint counter ranges.
const QUERY_STREAM_BASE: u64 = 1 << 32;
const DATASET_STREAM_BASE: u64 = 1;

/// Full description of a simulation experiment.
///
/// α = (ln n)/d is always derived, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: u32,
    pub n: u64,
    pub h: f64,
    pub gamma: f64,
    pub spectrum: SpectralDensity<f64>,
    /// Number of dataset resamples.
    pub num_datasets: u64,
    /// Number of query points (fluctuation studies cycle through them;
    /// the empirical-KL protocol averages over all of them).
    pub num_queries: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn alpha(&self) -> f64 {
        (self.n as f64).ln() / self.d as f64
    }

    pub fn kernel(&self) -> Result<GammaKernel<f64>> {
        GammaKernel::new(self.gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::InvalidConfig("d must be >= 1".into()));
        }
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be >= 1".into()));
        }
        if !(self.h > 0.0) {
            return Err(Error::InvalidConfig(format!("h must be > 0, got {}", self.h)));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be >= 1, got {}",
                self.gamma
            )));
        }
        if self.num_datasets < 1 || self.num_queries < 1 {
            return Err(Error::InvalidConfig(
                "num_datasets and num_queries must be >= 1".into(),
            ));
        }
        let elements = self.n * self.d as u64;
        if elements > DATASET_ELEMENT_CAP {
            return Err(Error::ResourceCap {
                message: "dataset elements n*d; lower n or d".into(),
                requested: elements,
                cap: DATASET_ELEMENT_CAP,
            });
        }
        Ok(())
    }

    /// Generator for dataset resample `trial`.
    pub(crate) fn dataset_rng(&self, trial: u64) -> ChaCha8Rng {
        stream_rng(self.seed, DATASET_STREAM_BASE + trial)
    }

    /// Generator for query point `index`.
    pub(crate) fn query_rng(&self, index: u64) -> ChaCha8Rng {
        stream_rng(self.seed, QUERY_STREAM_BASE + index)
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
