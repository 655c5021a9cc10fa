//! Closed-form theory for centered Gaussian data with covariance
//! spectrum ρ_C.
//!
//! For a typical query point x and an independent data point y, the
//! scaled squared distance l = |x−y|²/d has log-moment generating
//! function
//!
//! ```text
//! ψ(t) = −(1/2) ⟨ ln(1+tλ) + tλ/(1+tλ) ⟩          (⟨·⟩ over ρ_C)
//! ```
//!
//! whose Legendre transform J(u) = sup_t [−ψ(t) − tu/2] is the large
//! deviation rate of l. The replica free entropy at parameter m follows
//! from the stationary pair (l, l̂) of
//!
//! ```text
//! l̂/2 = (m/h²) f_γ'(l/h²),     l = ⟨ λ/(1+l̂λ) + λ/(1+l̂λ)² ⟩
//! ```
//!
//! which this module solves for arbitrary γ-kernels (for γ = 1 the
//! first equation collapses to l̂ = m/h², and everything downstream has
//! a closed form used as a cross-check).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GammaKernel;
use crate::numeric::roots::{bisect, golden_max};
use crate::scalar::{lit, Real};
use crate::spectrum::SpectralDensity;

/// Log-MGF of the scaled squared distance, ψ(t) for t ≥ 0.
///
/// ψ(0) = 0; ψ is concave and strictly decreasing.
pub fn psi<T: Real>(t: T, spectrum: &SpectralDensity<T>) -> Result<T> {
    if t < T::zero() {
        return Err(Error::domain("psi", format!("t must be >= 0, got {t}")));
    }
    Ok(psi_extended(t, spectrum))
}

/// ψ on its full analytic domain t > −1/λ_max (negative t is needed to
/// tabulate the rate function above its minimum).
fn psi_extended<T: Real>(t: T, spectrum: &SpectralDensity<T>) -> T {
    let half: T = lit(0.5);
    -half
        * spectrum.average(|lambda| {
            let q = T::one() + t * lambda;
            q.ln() + t * lambda / q
        })
}

/// −2 ψ'(t) = ⟨ λ/(1+tλ) + λ/(1+tλ)² ⟩, the stationary value of l at
/// conjugate parameter t. Strictly decreasing in t; equals u_typ at
/// t = 0.
pub(crate) fn stationary_l<T: Real>(t: T, spectrum: &SpectralDensity<T>) -> T {
    spectrum.average(|lambda| {
        let q = T::one() + t * lambda;
        lambda / q + lambda / (q * q)
    })
}

/// (1/2) ⟨ ln(1+l̂λ) − l̂λ/(1+l̂λ)² ⟩.
///
/// This combination drives both the glass criterion (D = this − α at
/// the m = 1 saddle) and the m-derivative of the replica free entropy;
/// it is strictly increasing in l̂ from 0 to ∞.
pub(crate) fn condensation_functional<T: Real>(l_hat: T, spectrum: &SpectralDensity<T>) -> T {
    let half: T = lit(0.5);
    half * spectrum.average(|lambda| {
        let q = T::one() + l_hat * lambda;
        q.ln() - l_hat * lambda / (q * q)
    })
}

// ---------------------------------------------------------------------------
// Rate function
// ---------------------------------------------------------------------------

/// Tabulated large-deviation rate J(u) of u = |x−y|²/d, with the
/// conjugate parameter t*(u) at every node (J'(u) = −t*(u)/2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFunction<T> {
    u: Vec<T>,
    j: Vec<T>,
    t_star: Vec<T>,
    u_typ: T,
}

impl<T: Real> RateFunction<T> {
    pub fn grid(&self) -> &[T] {
        &self.u
    }

    pub fn values(&self) -> &[T] {
        &self.j
    }

    /// Conjugate parameters t*(u) (positive below u_typ, negative above).
    pub fn conjugates(&self) -> &[T] {
        &self.t_star
    }

    /// J'(u) = −t*(u)/2 by the envelope theorem.
    pub fn derivative_at(&self, idx: usize) -> T {
        -self.t_star[idx] * lit(0.5)
    }

    /// Typical value u_typ = 2⟨λ⟩, the zero of J.
    pub fn u_typ(&self) -> T {
        self.u_typ
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

const DEFAULT_GRID_LEN: usize = 512;

/// Default tabulation grid: 512 log-spaced nodes on [0.05, 1.5]·u_typ.
pub fn default_u_grid<T: Real>(spectrum: &SpectralDensity<T>) -> Vec<T> {
    let u_typ = stationary_l(T::zero(), spectrum);
    let lo = (u_typ * lit(0.05)).ln();
    let hi = (u_typ * lit(1.5)).ln();
    (0..DEFAULT_GRID_LEN)
        .map(|k| {
            let s = lit::<T>(k as f64 / (DEFAULT_GRID_LEN - 1) as f64);
            (lo + (hi - lo) * s).exp()
        })
        .collect()
}

/// Rate at a single u: J(u) = sup_t [−ψ(t) − tu/2], returned with the
/// maximizing t*.
///
/// The inner maximization is a golden-section search on a bracket that
/// is grown geometrically until the derivative −ψ'(t) − u/2 changes
/// sign: t ∈ [0, t_max] below u_typ, t ∈ (−1/λ_max, 0] above it.
pub fn rate_value<T: Real>(u: T, spectrum: &SpectralDensity<T>) -> Result<(T, T)> {
    if !(u > T::zero()) {
        return Err(Error::domain("rate_value", format!("u must be > 0, got {u}")));
    }
    let objective = |t: T| -psi_extended(t, spectrum) - t * u * lit(0.5);
    let u_typ = stationary_l(T::zero(), spectrum);
    let (t_lo, t_hi) = if u <= u_typ {
        // derivative at t is (l(t) − u)/2; positive at 0, grow until negative
        let mut hi = T::one();
        let mut grown = 0;
        while stationary_l(hi, spectrum) > u {
            hi = hi * lit(4.0);
            grown += 1;
            if grown > 600 {
                return Err(Error::NonConvergence {
                    op: "rate_value bracket",
                    iterations: grown,
                    residual: f64::INFINITY,
                });
            }
        }
        (T::zero(), hi)
    } else {
        // maximizer at negative t; l(t) → ∞ as t → −1/λ_max
        let t_min = -spectrum.max_eigenvalue().recip();
        let mut frac: T = lit(0.5);
        let mut lo = t_min * frac;
        let mut grown = 0;
        while stationary_l(lo, spectrum) < u {
            frac = T::one() - (T::one() - frac) * lit(0.25);
            lo = t_min * frac;
            grown += 1;
            if grown > 600 {
                return Err(Error::NonConvergence {
                    op: "rate_value bracket",
                    iterations: grown,
                    residual: f64::INFINITY,
                });
            }
        }
        (lo, T::zero())
    };
    let tol = lit::<T>(1e-11) * (T::one() + t_hi - t_lo);
    let (t_star, j) = golden_max(objective, t_lo, t_hi, tol);
    Ok((j, t_star))
}

/// Tabulate the rate function on `u_grid` (ascending, positive).
pub fn rate_function<T: Real>(
    spectrum: &SpectralDensity<T>,
    u_grid: &[T],
) -> Result<RateFunction<T>> {
    if u_grid.is_empty() {
        return Err(Error::domain("rate_function", "empty u grid"));
    }
    let mut u = Vec::with_capacity(u_grid.len());
    let mut j = Vec::with_capacity(u_grid.len());
    let mut t_star = Vec::with_capacity(u_grid.len());
    for &node in u_grid {
        let (jv, tv) = rate_value(node, spectrum)?;
        u.push(node);
        j.push(jv);
        t_star.push(tv);
    }
    Ok(RateFunction {
        u,
        j,
        t_star,
        u_typ: stationary_l(T::zero(), spectrum),
    })
}

/// Smallest root of J(u_G) = α (left branch of the rate function).
pub fn u_g<T: Real>(alpha: T, spectrum: &SpectralDensity<T>) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::domain("u_g", format!("alpha must be > 0, got {alpha}")));
    }
    let u_typ = stationary_l(T::zero(), spectrum);
    let mut lo = u_typ * lit(0.5);
    let mut grown = 0;
    while rate_value(lo, spectrum)?.0 < alpha {
        lo = lo * lit(0.5);
        grown += 1;
        if grown > 900 {
            return Err(Error::NonConvergence {
                op: "u_g bracket",
                iterations: grown,
                residual: f64::INFINITY,
            });
        }
    }
    bisect(
        "u_g",
        |u| rate_value(u, spectrum).map(|(j, _)| j - alpha).unwrap_or(T::nan()),
        lo,
        u_typ,
        lit(1e-12),
    )
}

// ---------------------------------------------------------------------------
// Saddle point
// ---------------------------------------------------------------------------

/// Stationary pair (l, l̂) of the replica free entropy at parameter m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution<T> {
    pub l: T,
    pub l_hat: T,
    pub m: T,
    pub converged: bool,
    /// Residual of the l̂-stationarity equation at the returned point
    /// (the l-equation is satisfied by construction).
    pub residual: T,
}

const SADDLE_TOL: f64 = 1e-12;
const SADDLE_MAX_ITER: usize = 10_000;
const SADDLE_DAMPING: f64 = 0.5;

/// Solve the stationarity equations at (m, h) for the given kernel.
///
/// Damped fixed-point iteration (damping 0.5, tolerance 1e−12 relative,
/// at most 10⁴ sweeps) alternating the two equations; if the iteration
/// stalls, a bisection on the composed map l̂ ↦ l̂ − 2(m/h²)f'(l(l̂)/h²)
/// takes over (that map is strictly increasing, so the root is unique).
pub fn solve_saddle<T: Real>(
    m: T,
    h: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> Result<SaddleSolution<T>> {
    if !(m > T::zero()) {
        return Err(Error::domain("solve_saddle", format!("m must be > 0, got {m}")));
    }
    if !(h > T::zero()) {
        return Err(Error::domain("solve_saddle", format!("h must be > 0, got {h}")));
    }
    let h2 = h * h;
    let update = |l_hat: T| -> T {
        let l = stationary_l(l_hat, spectrum);
        (m / h2) * kernel.rate_derivative(l / h2) * lit(2.0)
    };
    let residual_of = |l_hat: T| -> T {
        let scale = T::one() + l_hat.abs();
        (l_hat - update(l_hat)).abs() / scale
    };
    let tol: T = lit(SADDLE_TOL);

    // Gaussian kernel: f' is constant 1/2, the fixed point is exact.
    if kernel.is_gaussian() {
        let l_hat = m / h2;
        return Ok(SaddleSolution {
            l: stationary_l(l_hat, spectrum),
            l_hat,
            m,
            converged: true,
            residual: residual_of(l_hat),
        });
    }

    let damping: T = lit(SADDLE_DAMPING);
    let mut l_hat = m / h2;
    for _ in 0..SADDLE_MAX_ITER {
        let next = update(l_hat);
        l_hat = l_hat * (T::one() - damping) + next * damping;
        if residual_of(l_hat) < tol {
            return Ok(SaddleSolution {
                l: stationary_l(l_hat, spectrum),
                l_hat,
                m,
                converged: true,
                residual: residual_of(l_hat),
            });
        }
    }

    // Fallback: bisection on the (strictly increasing) composed map.
    let composed = |x: T| x - update(x);
    let mut hi = (m / h2).max(T::one());
    let mut grown = 0;
    while composed(hi) < T::zero() {
        hi = hi * lit(4.0);
        grown += 1;
        if grown > 500 {
            return Err(Error::NonConvergence {
                op: "solve_saddle",
                iterations: SADDLE_MAX_ITER,
                residual: residual_of(l_hat).to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let root = bisect("solve_saddle", composed, T::zero(), hi, lit(0.0))?;
    let residual = residual_of(root);
    if residual > lit(1e-9) {
        return Err(Error::NonConvergence {
            op: "solve_saddle",
            iterations: SADDLE_MAX_ITER,
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(SaddleSolution {
        l: stationary_l(root, spectrum),
        l_hat: root,
        m,
        converged: true,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Free entropies
// ---------------------------------------------------------------------------

/// ḡ(h², m) = m c_γ − m ln h + sup_l [−I(l) − m f_γ(l/h²)], evaluated
/// through the saddle: −I(l) = ψ(l̂) + l̂ l / 2 at the stationary pair.
pub fn g_bar<T: Real>(
    m: T,
    h: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> Result<T> {
    let saddle = solve_saddle(m, h, kernel, spectrum)?;
    Ok(g_bar_at(&saddle, h, kernel, spectrum))
}

pub(crate) fn g_bar_at<T: Real>(
    saddle: &SaddleSolution<T>,
    h: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> T {
    let h2 = h * h;
    let half: T = lit(0.5);
    saddle.m * kernel.c_gamma() - saddle.m * h.ln()
        + psi_extended(saddle.l_hat, spectrum)
        + saddle.l_hat * saddle.l * half
        - saddle.m * kernel.rate_unchecked(saddle.l / h2)
}

/// Replica free entropy φ_{α,h}(m) = (1−m)/m · α + ḡ(h², m)/m.
pub fn phi<T: Real>(
    alpha: T,
    h: T,
    m: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::domain("phi", format!("alpha must be > 0, got {alpha}")));
    }
    let g = g_bar(m, h, kernel, spectrum)?;
    Ok((T::one() - m) / m * alpha + g / m)
}

/// m² ∂φ/∂m via the envelope theorem: stationarity in (l, l̂) leaves
/// only the explicit m-dependence, giving
/// m² φ'(m) = −α + (1/2)⟨ln(1+l̂λ) − l̂λ/(1+l̂λ)²⟩ at the m-saddle.
pub fn phi_m_derivative<T: Real>(
    alpha: T,
    h: T,
    m: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> Result<T> {
    let saddle = solve_saddle(m, h, kernel, spectrum)?;
    Ok((condensation_functional(saddle.l_hat, spectrum) - alpha) / (m * m))
}

/// D(α, h) = ∂φ/∂m at m = 1, through the stationary l̂* of the m = 1
/// saddle. Negative in the RS phase, positive in the condensed phase.
pub fn big_d<T: Real>(
    alpha: T,
    h: T,
    kernel: &GammaKernel<T>,
    spectrum: &SpectralDensity<T>,
) -> Result<T> {
    phi_m_derivative(alpha, h, T::one(), kernel, spectrum)
}

/// Closed form of φ for the Gaussian kernel (γ = 1), where l̂ = m/h²:
///
/// ```text
/// φ = (1−m)/m (α + ln h) − (1/2)ln 2π − (1/(2m))⟨ln(h²+mλ)⟩ − (1/2)⟨λ/(h²+mλ)⟩
/// ```
///
/// Used as the independent route in equivalence tests against the
/// generic saddle pipeline.
pub fn phi_gaussian_closed_form<T: Real>(
    alpha: T,
    h: T,
    m: T,
    spectrum: &SpectralDensity<T>,
) -> T {
    let h2 = h * h;
    let half: T = lit(0.5);
    let two_pi = T::PI() + T::PI();
    (T::one() - m) / m * (alpha + h.ln()) - half * two_pi.ln()
        - spectrum.average(|lambda| (h2 + m * lambda).ln()) * half / m
        - spectrum.average(|lambda| lambda / (h2 + m * lambda)) * half
}
