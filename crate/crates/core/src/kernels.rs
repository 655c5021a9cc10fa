//! The γ-kernel family.
//!
//! A γ-kernel in dimension d is
//!
//! ```text
//! K_γ(x) = exp( d [ c_γ − (1/(2γ)) (|x|²/d)^γ ] ),      γ ≥ 1,
//! ```
//!
//! with `c_γ = −(1/2)(ln(2π) + 1 − 1/γ)` the large-d normalization
//! constant. γ = 1 is the Gaussian kernel. Because kernel values scale
//! exponentially with d, every evaluation here stays in the log domain;
//! the only exponentiating accessor is clamped and meant for
//! diagnostics at small d.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Large-d normalization constant `c_γ = −(1/2)(ln(2π) + 1 − 1/γ)`.
///
/// This is the leading-exponential-order constant and is used at all d;
/// finite-d Stirling corrections are of relative order ln(d)/d and are
/// deliberately not applied.
pub fn c_gamma<T: Real>(gamma: T) -> Result<T> {
    if !(gamma >= T::one()) {
        return Err(Error::domain("c_gamma", format!("gamma must be >= 1, got {gamma}")));
    }
    let two_pi = T::PI() + T::PI();
    Ok(-(two_pi.ln() + T::one() - gamma.recip()) * lit(0.5))
}

/// Radial rate function of the kernel, `f_γ(u) = u^γ / (2γ)`.
pub fn f_gamma<T: Real>(u: T, gamma: T) -> Result<T> {
    if u < T::zero() {
        return Err(Error::domain("f_gamma", format!("u must be >= 0, got {u}")));
    }
    if !(gamma >= T::one()) {
        return Err(Error::domain("f_gamma", format!("gamma must be >= 1, got {gamma}")));
    }
    Ok(u.powf(gamma) / (gamma + gamma))
}

/// A member of the γ-kernel family with its normalization constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaKernel<T> {
    gamma: T,
    c_gamma: T,
}

impl<T: Real> GammaKernel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        Ok(Self {
            gamma,
            c_gamma: c_gamma(gamma)?,
        })
    }

    /// The Gaussian member, γ = 1.
    pub fn gaussian() -> Self {
        Self::new(T::one()).expect("gamma = 1 is valid")
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn c_gamma(&self) -> T {
        self.c_gamma
    }

    pub fn is_gaussian(&self) -> bool {
        self.gamma == T::one()
    }

    /// `f_γ(u)`, assuming `u ≥ 0` was already established by the caller.
    #[inline]
    pub(crate) fn rate_unchecked(&self, u: T) -> T {
        u.powf(self.gamma) / (self.gamma + self.gamma)
    }

    /// Checked `f_γ(u)`.
    pub fn rate(&self, u: T) -> Result<T> {
        f_gamma(u, self.gamma)
    }

    /// `f_γ'(u) = u^{γ−1} / 2`, monotone increasing for γ ≥ 1.
    #[inline]
    pub fn rate_derivative(&self, u: T) -> T {
        u.powf(self.gamma - T::one()) * lit(0.5)
    }

    /// Inverse of the rate function, `f_γ^{-1}(ε) = (2γε)^{1/γ}`.
    pub fn rate_inverse(&self, eps: T) -> T {
        ((self.gamma + self.gamma) * eps).powf(self.gamma.recip())
    }

    /// Log of `K_γ((x−y)/h)` with `u = |x−y|²/d`, entirely in the log
    /// domain: `d (c_γ − f_γ(u/h²))`.
    pub fn log_kernel(&self, dist_sq_over_d: T, h: T, d: u32) -> Result<T> {
        if dist_sq_over_d < T::zero() {
            return Err(Error::domain(
                "log_kernel",
                format!("squared distance must be >= 0, got {dist_sq_over_d}"),
            ));
        }
        if !(h > T::zero()) {
            return Err(Error::domain("log_kernel", format!("h must be > 0, got {h}")));
        }
        if d == 0 {
            return Err(Error::domain("log_kernel", "dimension must be >= 1"));
        }
        Ok(self.log_kernel_unchecked(dist_sq_over_d, h, d))
    }

    #[inline]
    pub(crate) fn log_kernel_unchecked(&self, dist_sq_over_d: T, h: T, d: u32) -> T {
        let u = dist_sq_over_d / (h * h);
        lit::<T>(d as f64) * (self.c_gamma - self.rate_unchecked(u))
    }

    /// Exponentiated kernel value, clamped to avoid overflow.
    ///
    /// Diagnostic only (plots, small-d quadrature checks); all
    /// production paths consume [`GammaKernel::log_kernel`].
    pub fn kernel_value_clamped(&self, dist_sq_over_d: T, h: T, d: u32) -> Result<T> {
        let log_k = self.log_kernel(dist_sq_over_d, h, d)?;
        let cap = lit(700.0);
        Ok(log_k.min(cap).exp())
    }
}
