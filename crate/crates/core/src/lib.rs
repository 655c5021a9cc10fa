//! # hdkde
//!
//! Kernel density estimation in the joint large-(n, d) limit with
//! α = (ln n)/d fixed: full phase diagram, replica free entropy, KL
//! divergence and optimal bandwidth for Gaussian data, plus a seeded
//! Monte-Carlo simulator that puts the theory to the test.
//!
//! ## The statistical picture
//!
//! Write the estimator built from n data points y_i in dimension d as
//!
//! ```text
//! ρ̂_h(x) = (1/(n h^d)) Σ_i K_γ((x − y_i)/h)
//! ```
//!
//! with a [`kernels::GammaKernel`]. At fixed α = (ln n)/d the bandwidth
//! axis splits into three regimes separated by two computable lines:
//!
//! * `h > h_CLT(α)`: classical bias/variance behaviour, Gaussian
//!   fluctuations;
//! * `h_G(α) < h < h_CLT(α)`: the CLT fails; fluctuations follow a
//!   heavy-tailed stable law of index in (1, 2);
//! * `h < h_G(α)`: condensation — a handful of nearest data points
//!   carry the whole estimate, typical and average values separate,
//!   and the tail index m* drops below 1.
//!
//! The optimal bandwidth in KL divergence always lies in the condensed
//! regime, and the minimal KL value is independent of the kernel
//! exponent γ.
//!
//! ## Layout
//!
//! | module | contents |
//! |--------|----------|
//! | [`kernels`] | γ-kernel family, normalization, log-domain evaluation |
//! | [`spectrum`] | eigenvalue distribution of the data covariance |
//! | [`gaussian`] | ψ(t), rate function, saddle equations, replica free entropy |
//! | [`phase`] | h_CLT, h_G, condensation exponent m*, regime classification |
//! | [`kl`] | KL curves, optimal bandwidth, kernel-independent minimum |
//! | [`rem`] | generalized Random Energy Model engine and simulator |
//! | [`sim`] | Monte-Carlo experiments on the actual estimator |
//! | [`numeric`] | bracketing solvers, log-sum-exp, special functions |
//!
//! The analytic layer is generic over the scalar type through
//! [`scalar::Real`] (`f32`/`f64`); the aliases below fix `f64`, which
//! is what the simulators and the CLI consume.
//!
//! ## Quick start
//!
//! ```rust
//! use hdkde::{GammaKernel, SpectralDensity};
//!
//! let kernel = GammaKernel::gaussian();
//! let spectrum = SpectralDensity::identity();
//! let alpha = 0.1;
//!
//! let h_clt = hdkde::phase::h_clt(alpha, &kernel, &spectrum).unwrap();
//! let h_g = hdkde::phase::h_g(alpha, &kernel, &spectrum).unwrap();
//! assert!(h_g < h_clt);
//!
//! let (h_opt, dkl_min) = hdkde::kl::h_opt(alpha, &kernel, &spectrum).unwrap();
//! assert!(h_opt < h_g); // the optimum sits in the condensed phase
//! assert!(dkl_min > 0.0);
//! ```

pub mod error;
pub mod gaussian;
pub mod kernels;
pub mod kl;
pub mod numeric;
pub mod phase;
pub mod rem;
pub mod scalar;
pub mod sim;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default scalar type for concrete use.
pub type Scalar = f64;

/// γ-kernel over the default scalar.
pub type GammaKernel = kernels::GammaKernel<Scalar>;
/// Spectral density over the default scalar.
pub type SpectralDensity = spectrum::SpectralDensity<Scalar>;
/// Saddle solution over the default scalar.
pub type SaddleSolution = gaussian::SaddleSolution<Scalar>;
/// Tabulated rate function over the default scalar.
pub type RateFunction = gaussian::RateFunction<Scalar>;
/// Classified phase point over the default scalar.
pub type PhasePoint = phase::PhasePoint<Scalar>;
/// KL curve point over the default scalar.
pub type KlCurvePoint = kl::KlCurvePoint<Scalar>;
/// REM analysis over the default scalar.
pub type RemAnalysis = rem::RemAnalysis<Scalar>;
