//! Log-domain evaluation of the kernel density estimator.

use crate::error::{Error, Result};
use crate::kernels::GammaKernel;
use crate::numeric::logsum::logsumexp;

/// Everything one evaluation of ρ̂ at a query point yields: the log
/// density, the nearest scaled squared distance, the participation
/// ratios of the normalized kernel weights, and the log of the p-norm
/// sums (Σ z_i^p)^{1/p} needed by the stable-law normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEval {
    /// ln ρ̂ (full, including the 1/(n h^d) prefactor).
    pub log_density: f64,
    /// min_i |x−y_i|²/d.
    pub u_min: f64,
    /// Y₂ = Σ w_i², Y₃ = Σ w_i³ of w_i = z_i/Σz_j.
    pub y2: f64,
    pub y3: f64,
    /// ln ρ̂_{h,2} = (1/2) ln Σ z_i².
    pub log_density_p2: f64,
}

/// ln ρ̂ = −ln n − d ln h + logsumexp_i ln K_γ((x−y_i)/h), exact in the
/// log domain (nothing is exponentiated at full scale).
pub fn log_density_at(
    query: &[f64],
    dataset: &[f64],
    h: f64,
    kernel: &GammaKernel<f64>,
) -> Result<f64> {
    Ok(evaluate_density(query, dataset, h, kernel)?.log_density)
}

/// Full evaluation; `dataset` is row-major n×d with d = query.len().
pub fn evaluate_density(
    query: &[f64],
    dataset: &[f64],
    h: f64,
    kernel: &GammaKernel<f64>,
) -> Result<DensityEval> {
    let d = query.len();
    if d == 0 || dataset.is_empty() || dataset.len() % d != 0 {
        return Err(Error::domain(
            "evaluate_density",
            "dataset must be a non-empty multiple of the query dimension",
        ));
    }
    if !(h > 0.0) {
        return Err(Error::domain("evaluate_density", format!("h must be > 0, got {h}")));
    }
    let n = dataset.len() / d;
    let mut log_terms = Vec::with_capacity(n);
    let mut u_min = f64::INFINITY;
    for i in 0..n {
        let row = &dataset[i * d..(i + 1) * d];
        let mut dist_sq = 0.0;
        for (a, b) in query.iter().zip(row) {
            let diff = a - b;
            dist_sq += diff * diff;
        }
        let u = dist_sq / d as f64;
        if u < u_min {
            u_min = u;
        }
        log_terms.push(kernel.log_kernel_unchecked(u, h, d as u32));
    }
    let lse = logsumexp(&log_terms);
    let (mut y2, mut y3, mut sum_2p) = (0.0f64, 0.0f64, 0.0f64);
    let mut max2 = f64::NEG_INFINITY;
    for &t in &log_terms {
        let w = (t - lse).exp();
        y2 += w * w;
        y3 += w * w * w;
        if 2.0 * t > max2 {
            max2 = 2.0 * t;
        }
    }
    for &t in &log_terms {
        sum_2p += (2.0 * t - max2).exp();
    }
    let prefactor = -(n as f64).ln() - d as f64 * h.ln();
    Ok(DensityEval {
        log_density: prefactor + lse,
        u_min,
        y2,
        y3,
        log_density_p2: prefactor + 0.5 * (max2 + sum_2p.ln()),
    })
}
