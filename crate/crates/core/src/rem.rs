//! Generalized Random Energy Model engine.
//!
//! A REM instance is n = e^{αd} iid energies ε with large-deviation
//! rate I(ε) and the partition function Z = Σ_i e^{−βdε_i}. Everything
//! the kernel estimator does maps onto this model (with β = 1 and
//! ε = f_γ(|x−y|²/(dh²))), so the module doubles as the validation
//! target for that mapping: rate-function analysis, the condensation
//! transition, the replica free entropy Φ_REM(m), Gumbel statistics of
//! the minimum, participation ratios, and a direct simulator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::rate_value;
use crate::kernels::GammaKernel;
use crate::numeric::logsum::StreamingLogSumExp;
use crate::numeric::roots::bisect;
use crate::numeric::special::normal_quantile;
use crate::scalar::{lit, Real};
use crate::spectrum::SpectralDensity;

/// Hard cap on the number of energy terms a single trial may draw.
/// Beyond this the simulation is refused with guidance to lower d or α.
pub const ENERGY_TERM_CAP: u64 = 1 << 26;

/// Large-deviation rate of the energy distribution, with derivative.
///
/// Must be non-negative and strictly convex with a unique zero at
/// [`RateCurve::typical`].
pub trait RateCurve<T>: Send + Sync {
    fn value(&self, eps: T) -> T;
    fn derivative(&self, eps: T) -> T;
    /// Location of the zero (and minimum) of the rate.
    fn typical(&self) -> T;
    /// Open interval on which the rate may be evaluated.
    fn domain(&self) -> (T, T);
}

/// Gaussian REM rate I(ε) = ε², the classical Derrida choice
/// (energies ε ~ N(0, 1/(2d))).
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianRate;

impl<T: Real> RateCurve<T> for GaussianRate {
    fn value(&self, eps: T) -> T {
        eps * eps
    }

    fn derivative(&self, eps: T) -> T {
        eps + eps
    }

    fn typical(&self) -> T {
        T::zero()
    }

    fn domain(&self) -> (T, T) {
        (-T::max_value(), T::max_value())
    }
}

/// Piecewise-linear rate curve from tabulated (ε, I) nodes, for rate
/// functions that only exist as tables. The derivative is the local
/// secant slope; accuracy follows the table resolution.
#[derive(Debug, Clone)]
pub struct TabulatedRate<T> {
    eps: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> TabulatedRate<T> {
    pub fn new(eps: Vec<T>, values: Vec<T>) -> Result<Self> {
        if eps.len() != values.len() || eps.len() < 3 {
            return Err(Error::domain(
                "TabulatedRate",
                "need at least three matching (eps, value) nodes",
            ));
        }
        if !eps.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("TabulatedRate", "eps grid must be increasing"));
        }
        Ok(Self { eps, values })
    }

    fn segment(&self, eps: T) -> usize {
        match self.eps.binary_search_by(|probe| {
            probe.partial_cmp(&eps).unwrap_or(std::cmp::Ordering::Less)
        }) {
            Ok(i) => i.min(self.eps.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.eps.len() - 2),
        }
    }
}

impl<T: Real> RateCurve<T> for TabulatedRate<T> {
    fn value(&self, eps: T) -> T {
        let i = self.segment(eps);
        let slope = (self.values[i + 1] - self.values[i]) / (self.eps[i + 1] - self.eps[i]);
        self.values[i] + slope * (eps - self.eps[i])
    }

    fn derivative(&self, eps: T) -> T {
        let i = self.segment(eps);
        (self.values[i + 1] - self.values[i]) / (self.eps[i + 1] - self.eps[i])
    }

    fn typical(&self) -> T {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] < self.values[best] {
                best = i;
            }
        }
        self.eps[best]
    }

    fn domain(&self) -> (T, T) {
        (self.eps[0], *self.eps.last().unwrap())
    }
}

/// Energy rate induced by the kernel-density mapping: the estimator's
/// terms have energies ε = f_γ(u/h²) with u = |x−y|²/d, so
/// I(ε) = J₁(h² f_γ^{-1}(ε)).
pub struct KernelEnergyRate<'a, T> {
    spectrum: &'a SpectralDensity<T>,
    kernel: GammaKernel<T>,
    h: T,
}

impl<'a, T: Real> KernelEnergyRate<'a, T> {
    pub fn new(spectrum: &'a SpectralDensity<T>, kernel: GammaKernel<T>, h: T) -> Self {
        Self { spectrum, kernel, h }
    }

    fn u_of_eps(&self, eps: T) -> T {
        self.h * self.h * self.kernel.rate_inverse(eps)
    }
}

impl<T: Real> RateCurve<T> for KernelEnergyRate<'_, T> {
    fn value(&self, eps: T) -> T {
        match rate_value(self.u_of_eps(eps), self.spectrum) {
            Ok((j, _)) => j,
            Err(_) => T::nan(),
        }
    }

    fn derivative(&self, eps: T) -> T {
        // dI/dε = J₁'(u) · du/dε with du/dε = h² / f_γ'(u/h²)
        let u = self.u_of_eps(eps);
        match rate_value(u, self.spectrum) {
            Ok((_, t_star)) => {
                let half: T = lit(0.5);
                let h2 = self.h * self.h;
                -t_star * half * h2 / self.kernel.rate_derivative(u / h2)
            }
            Err(_) => T::nan(),
        }
    }

    fn typical(&self) -> T {
        let u_typ = crate::gaussian::stationary_l(T::zero(), self.spectrum);
        self.kernel
            .rate_unchecked(u_typ / (self.h * self.h))
    }

    fn domain(&self) -> (T, T) {
        (lit(1e-300), T::max_value())
    }
}

/// A REM instance: rate curve, level-density exponent α = (ln n)/d,
/// dimension and inverse temperature (β = 1 in the KDE mapping).
pub struct RemSpec<T, R> {
    pub rate: R,
    pub alpha: T,
    pub d: u32,
    pub beta: T,
}

impl<T: Real, R: RateCurve<T>> RemSpec<T, R> {
    pub fn new(rate: R, alpha: T, d: u32, beta: T) -> Self {
        Self { rate, alpha, d, beta }
    }

    /// Number of energy terms, n = round(e^{αd}).
    pub fn num_terms(&self) -> u64 {
        (self.alpha * lit::<T>(self.d as f64))
            .exp()
            .round()
            .to_f64()
            .map(|v| v as u64)
            .unwrap_or(u64::MAX)
    }
}

/// Output of the asymptotic analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemAnalysis<T> {
    /// Smallest and largest roots of α − I(ε) = 0 (the band edges).
    pub eps0: T,
    pub eps1: T,
    /// β_c = |I'(ε₀)|; condensation occurs when β exceeds it.
    pub beta_c: T,
    /// Interior Laplace maximizer; present in the uncondensed phase.
    pub eps_tilde: Option<T>,
    pub condensed: bool,
    /// lim (1/d) log Z.
    pub phi: T,
    /// Condensation index m* = β_c / β.
    pub m_star: T,
}

fn expand_to_sign_change<T: Real>(
    op: &'static str,
    f: &impl Fn(T) -> T,
    start: T,
    limit: T,
    leftwards: bool,
) -> Result<T> {
    // geometric expansion from `start` toward `limit`, looking for f > 0
    let mut step = T::one().min((limit - start).abs() * lit(0.25)).max(lit(1e-6));
    for _ in 0..600 {
        let probe = if leftwards { start - step } else { start + step };
        let clamped = if leftwards { probe.max(limit) } else { probe.min(limit) };
        let v = f(clamped);
        if v.is_finite() && v > T::zero() {
            return Ok(clamped);
        }
        if clamped == limit {
            break;
        }
        step = step * lit(2.0);
    }
    Err(Error::BracketFailure {
        op,
        lo: start.to_f64().unwrap_or(f64::NAN),
        hi: limit.to_f64().unwrap_or(f64::NAN),
    })
}

/// Asymptotic analysis: band edges, β_c, phase, free entropy.
pub fn analyze<T: Real, R: RateCurve<T>>(spec: &RemSpec<T, R>) -> Result<RemAnalysis<T>> {
    if !(spec.alpha > T::zero()) || !(spec.beta > T::zero()) {
        return Err(Error::domain("rem_analyze", "alpha and beta must be > 0"));
    }
    let rate = &spec.rate;
    let (dom_lo, dom_hi) = rate.domain();
    let typ = rate.typical();
    let alpha = spec.alpha;
    let beta = spec.beta;

    let gap = |eps: T| rate.value(eps) - alpha;
    let left = expand_to_sign_change("rem eps0", &gap, typ, dom_lo, true)?;
    let eps0 = bisect("rem eps0", gap, left, typ, lit(1e-14))?;
    let right = expand_to_sign_change("rem eps1", &gap, typ, dom_hi, false)?;
    let eps1 = bisect("rem eps1", gap, typ, right, lit(1e-14))?;

    let beta_c = rate.derivative(eps0).abs();
    let condensed = beta_c < beta;
    let m_star = beta_c / beta;

    let (phi, eps_tilde) = if condensed {
        (-beta * eps0, None)
    } else {
        // interior maximizer of α − I(ε) − βε: I'(ε̃) = −β
        let slope = |eps: T| -(rate.derivative(eps) + beta);
        let left = expand_to_sign_change("rem eps_tilde", &slope, typ, dom_lo, true)?;
        let eps_tilde = bisect("rem eps_tilde", slope, left, typ, lit(1e-14))?;
        (alpha - rate.value(eps_tilde) - beta * eps_tilde, Some(eps_tilde))
    };

    Ok(RemAnalysis {
        eps0,
        eps1,
        beta_c,
        eps_tilde,
        condensed,
        phi,
        m_star,
    })
}

/// Replica free entropy Φ_REM(m) = (α + ḡ(mβ))/m with
/// ḡ(s) = −I(ε̄) − s ε̄ at the stationary ε̄ solving I'(ε̄) = −s.
pub fn phi_rem<T: Real, R: RateCurve<T>>(spec: &RemSpec<T, R>, m: T) -> Result<T> {
    if !(m > T::zero()) {
        return Err(Error::domain("phi_rem", format!("m must be > 0, got {m}")));
    }
    let g = rem_g_bar(&spec.rate, m * spec.beta)?;
    Ok((spec.alpha + g) / m)
}

/// dΦ_REM/dm = (I(ε̄(mβ)) − α)/m² (envelope form).
pub fn phi_rem_derivative<T: Real, R: RateCurve<T>>(spec: &RemSpec<T, R>, m: T) -> Result<T> {
    let eps_bar = stationary_energy(&spec.rate, m * spec.beta)?;
    Ok((spec.rate.value(eps_bar) - spec.alpha) / (m * m))
}

fn stationary_energy<T: Real>(rate: &impl RateCurve<T>, s: T) -> Result<T> {
    let (dom_lo, _) = rate.domain();
    let typ = rate.typical();
    let slope = |eps: T| -(rate.derivative(eps) + s);
    let left = expand_to_sign_change("rem stationary energy", &slope, typ, dom_lo, true)?;
    bisect("rem stationary energy", slope, left, typ, lit(1e-14))
}

fn rem_g_bar<T: Real>(rate: &impl RateCurve<T>, s: T) -> Result<T> {
    let eps_bar = stationary_energy(rate, s)?;
    Ok(-rate.value(eps_bar) - s * eps_bar)
}

/// Level-density exponent at which the condensation transition sits:
/// the α solving β_c(α) = β.
pub fn condensation_alpha<T: Real>(rate: &impl RateCurve<T>, beta: T) -> Result<T> {
    let beta_c_of = |alpha: T| -> T {
        let spec = RemSpec {
            rate: ProxyRate(rate),
            alpha,
            d: 1,
            beta,
        };
        match analyze(&spec) {
            Ok(a) => a.beta_c - beta,
            Err(_) => T::nan(),
        }
    };
    let mut lo: T = lit(1e-12);
    let mut hi: T = T::one();
    let mut grown = 0;
    while beta_c_of(hi) < T::zero() {
        hi = hi * lit(4.0);
        grown += 1;
        if grown > 200 {
            return Err(Error::BracketFailure {
                op: "condensation_alpha",
                lo: 0.0,
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    while beta_c_of(lo) > T::zero() {
        lo = lo * lit(0.25);
        grown += 1;
        if grown > 400 {
            return Err(Error::BracketFailure {
                op: "condensation_alpha",
                lo: 0.0,
                hi: lo.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    bisect("condensation_alpha", beta_c_of, lo, hi, lit(0.0))
}

/// Borrowing adapter so [`condensation_alpha`] can reuse [`analyze`].
struct ProxyRate<'a, R>(&'a R);

impl<T: Real, R: RateCurve<T>> RateCurve<T> for ProxyRate<'_, R> {
    fn value(&self, eps: T) -> T {
        self.0.value(eps)
    }
    fn derivative(&self, eps: T) -> T {
        self.0.derivative(eps)
    }
    fn typical(&self) -> T {
        self.0.typical()
    }
    fn domain(&self) -> (T, T) {
        self.0.domain()
    }
}

/// Mean participation ratio in the condensed phase:
/// `E[Y_k] = Γ(k − m) / (Γ(k) Γ(1 − m))`.
///
/// This is the classical replica/extreme-value expression; the k = 2
/// case reduces to 1 − m, which is what the simulation oracle singles
/// out when adjudicating the formula.
pub fn participation_ratio<T: Real>(m_star: T, k: u32) -> Result<T> {
    if !(m_star > T::zero() && m_star < T::one()) {
        return Err(Error::domain(
            "participation_ratio",
            format!("m* must lie in (0,1), got {m_star}"),
        ));
    }
    if k < 2 {
        return Err(Error::domain("participation_ratio", "k must be >= 2"));
    }
    let kf: T = lit(k as f64);
    Ok((Real::ln_gamma(kf - m_star) - Real::ln_gamma(kf) - Real::ln_gamma(T::one() - m_star)).exp())
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// Draws one energy per call; implementations must match the rate curve
/// of the `RemSpec` they are paired with.
pub trait EnergySampler: Send + Sync {
    fn sample(&self, d: u32, rng: &mut ChaCha8Rng) -> f64;
}

/// ε ~ N(0, 1/(2d)), the sampler matching [`GaussianRate`].
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianEnergySampler;

impl EnergySampler for GaussianEnergySampler {
    fn sample(&self, d: u32, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z / (2.0 * d as f64).sqrt()
    }
}

/// Per-trial simulation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemTrial {
    pub trial: u64,
    pub log_z_over_d: f64,
    pub eps_min: f64,
    pub y2: f64,
    pub y3: f64,
    /// Boltzmann entropy density −(1/d) Σ p_i ln p_i.
    pub entropy_density: f64,
}

/// Simulation output; the seed that produced it travels with the data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemSamples {
    pub seed: u64,
    pub n: u64,
    pub d: u32,
    pub beta: f64,
    pub trials: Vec<RemTrial>,
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Direct REM simulation: per trial draws all n energies (twice — the
/// energy stream is replayed from its counter-based generator instead
/// of being stored), computes (1/d)log Z by streaming log-sum-exp, the
/// minimum energy, participation ratios and the entropy density.
///
/// Trials are independent work units keyed by (seed, trial index), so
/// results are reproducible regardless of the parallel schedule.
pub fn simulate<T: Real, R: RateCurve<T>>(
    spec: &RemSpec<T, R>,
    sampler: &impl EnergySampler,
    trials: u64,
    seed: u64,
) -> Result<RemSamples> {
    if trials < 1 {
        return Err(Error::domain("rem simulate", "need at least one trial"));
    }
    let n = spec.num_terms();
    if n < 1 {
        return Err(Error::domain("rem simulate", "n = round(e^{alpha d}) must be >= 1"));
    }
    if n > ENERGY_TERM_CAP {
        return Err(Error::ResourceCap {
            message: "energy terms per trial; lower d or alpha".into(),
            requested: n,
            cap: ENERGY_TERM_CAP,
        });
    }
    let d = spec.d;
    let beta = spec.beta.to_f64().expect("beta fits f64");
    let rows: Vec<RemTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            // pass 1: log Z and the minimum
            let mut rng = trial_rng(seed, trial);
            let mut lse = StreamingLogSumExp::new();
            let mut eps_min = f64::INFINITY;
            for _ in 0..n {
                let eps = sampler.sample(d, &mut rng);
                lse.push(-beta * d as f64 * eps);
                if eps < eps_min {
                    eps_min = eps;
                }
            }
            let log_z = lse.value();
            // pass 2: replay the stream for the Boltzmann weights
            let mut rng = trial_rng(seed, trial);
            let (mut y2, mut y3, mut mean_eps) = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..n {
                let eps = sampler.sample(d, &mut rng);
                let log_p = -beta * d as f64 * eps - log_z;
                let p = log_p.exp();
                y2 += p * p;
                y3 += p * p * p;
                mean_eps += p * eps;
            }
            // −(1/d) Σ p ln p = β Σ p ε + (log Z)/d
            let entropy_density = beta * mean_eps + log_z / d as f64;
            RemTrial {
                trial,
                log_z_over_d: log_z / d as f64,
                eps_min,
                y2,
                y3,
                entropy_density,
            }
        })
        .collect();
    Ok(RemSamples {
        seed,
        n,
        d,
        beta,
        trials: rows,
    })
}

/// Exact sample of the minimum of n iid N(0, 1/(2d)) energies through
/// the order-statistics inverse transform: 1 − F(ε_min) = V^{1/n} with
/// V uniform. No large-deviation approximation is involved, so this
/// scales to n far beyond the direct-simulation cap and is the route
/// the Gumbel tests use.
pub fn sample_minimum_gaussian_energy(n: u64, d: u32, rng: &mut ChaCha8Rng) -> f64 {
    let v = positive_uniform(rng);
    // min U = 1 − V^{1/n}, computed as −expm1(ln(V)/n)
    let min_u = (-f64::exp_m1(v.ln() / n as f64)).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
    normal_quantile(min_u) / (2.0 * d as f64).sqrt()
}

/// Exact sample of the k smallest energies (ascending), by the
/// sequential uniform order-statistics recursion with the tail tracked
/// in log space.
pub fn sample_smallest_gaussian_energies(
    n: u64,
    k: usize,
    d: u32,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    assert!((k as u64) <= n, "cannot draw more order statistics than terms");
    let sigma = 1.0 / (2.0 * d as f64).sqrt();
    let mut out = Vec::with_capacity(k);
    let mut ln_tail = 0.0f64; // ln(1 − U_(i))
    for i in 0..k {
        let w = positive_uniform(rng);
        ln_tail += w.ln() / (n - i as u64) as f64;
        let u = (-f64::exp_m1(ln_tail)).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
        out.push(sigma * normal_quantile(u));
    }
    out
}

fn positive_uniform(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::stats::{hill_tail_fit, ks_statistic, moments};

    fn gaussian_spec(alpha: f64, d: u32, beta: f64) -> RemSpec<f64, GaussianRate> {
        RemSpec::new(GaussianRate, alpha, d, beta)
    }

    #[test]
    fn analyze_gaussian_condensed() {
        let a = analyze(&gaussian_spec(0.09, 100, 1.0)).unwrap();
        assert!((a.eps0 + 0.3).abs() < 1e-10);
        assert!((a.eps1 - 0.3).abs() < 1e-10);
        assert!((a.beta_c - 0.6).abs() < 1e-10);
        assert!(a.condensed);
        assert!((a.m_star - 0.6).abs() < 1e-10);
        assert!((a.phi - 0.3).abs() < 1e-10);
        assert!(a.eps_tilde.is_none());
    }

    #[test]
    fn analyze_gaussian_uncondensed() {
        let a = analyze(&gaussian_spec(1.0, 100, 1.0)).unwrap();
        assert!(!a.condensed);
        assert!((a.beta_c - 2.0).abs() < 1e-10);
        let eps_tilde = a.eps_tilde.unwrap();
        assert!((eps_tilde + 0.5).abs() < 1e-10);
        assert!((a.phi - 1.25).abs() < 1e-10);
    }

    #[test]
    fn condensation_threshold_quarter() {
        let alpha_c = condensation_alpha(&GaussianRate, 1.0f64).unwrap();
        assert!((alpha_c - 0.25).abs() < 1e-8, "alpha_c = {alpha_c}");
    }

    #[test]
    fn phi_rem_gaussian_closed_form() {
        // ε̄(m) = −m/2, ḡ(m) = m²/4, Φ(m) = α/m + m/4
        let spec = gaussian_spec(0.16, 100, 1.0);
        for &m in &[0.3, 0.5, 0.8, 1.0, 1.7] {
            let v = phi_rem(&spec, m).unwrap();
            assert!((v - (0.16 / m + m / 4.0)).abs() < 1e-10, "m={m}");
        }
        // derivative root at m* = 2 sqrt(alpha) = β_c
        let root = bisect(
            "phi_rem root",
            |m| phi_rem_derivative(&spec, m).unwrap(),
            1e-3,
            1.999,
            1e-13,
        )
        .unwrap();
        assert!((root - 0.8).abs() < 1e-9, "root {root}");
        // envelope derivative vs finite differences
        for &m in &[0.4, 0.9, 1.5] {
            let fd = (phi_rem(&spec, m + 1e-6).unwrap() - phi_rem(&spec, m - 1e-6).unwrap())
                / 2e-6;
            let an = phi_rem_derivative(&spec, m).unwrap();
            assert!((fd - an).abs() < 1e-6, "m={m}: {fd} vs {an}");
        }
    }

    #[test]
    fn phi_rem_convex_and_agrees_with_analyze() {
        // condensed: Φ(m*) = −ε₀
        let spec = gaussian_spec(0.09, 100, 1.0);
        let a = analyze(&spec).unwrap();
        assert!((phi_rem(&spec, a.m_star).unwrap() - a.phi).abs() < 1e-8);
        // uncondensed: Φ(1) = φ
        let spec = gaussian_spec(1.0, 100, 1.0);
        let a = analyze(&spec).unwrap();
        assert!((phi_rem(&spec, 1.0).unwrap() - a.phi).abs() < 1e-8);
        // convexity wherever defined
        for &m in &[0.2, 0.5, 1.0, 1.5] {
            let dm = 1e-3;
            let f = |m: f64| phi_rem(&spec, m).unwrap();
            let second = (f(m + dm) - 2.0 * f(m) + f(m - dm)) / (dm * dm);
            assert!(second > -1e-7, "m={m}");
        }
    }

    #[test]
    fn participation_ratio_values() {
        for &m in &[0.1f64, 0.4357, 0.9] {
            let y2 = participation_ratio(m, 2).unwrap();
            assert!((y2 - (1.0 - m)).abs() < 1e-12, "m={m}");
        }
        // m → 1⁻ sends every Y_k to zero
        for k in 2..6 {
            assert!(participation_ratio(1.0 - 1e-9, k).unwrap() < 1e-7);
        }
        // Γ(2.5643)/(Γ(3) Γ(0.5643)) at m = 0.4357, k = 3
        let y3 = participation_ratio(0.4357f64, 3).unwrap();
        let expected = (libm::lgamma(2.5643) - libm::lgamma(3.0) - libm::lgamma(0.5643)).exp();
        assert!((y3 - expected).abs() < 1e-12);
        assert!(participation_ratio(1.2f64, 2).is_err());
        assert!(participation_ratio(0.5f64, 1).is_err());
    }

    #[test]
    fn tabulated_rate_tracks_its_analytic_source() {
        // Gaussian rate sampled on a grid: the analysis from the table
        // lands on the analytic answer within the table resolution
        let eps: Vec<f64> = (0..4001).map(|i| -2.0 + 4.0 * i as f64 / 4000.0).collect();
        let values: Vec<f64> = eps.iter().map(|&e| e * e).collect();
        let table = TabulatedRate::new(eps, values).unwrap();
        let spec = RemSpec::new(table, 0.09, 100, 1.0);
        let a = analyze(&spec).unwrap();
        assert!((a.eps0 + 0.3).abs() < 1e-3, "eps0 {}", a.eps0);
        assert!((a.beta_c - 0.6).abs() < 5e-3, "beta_c {}", a.beta_c);
        assert!(a.condensed);
        assert!((a.phi - 0.3).abs() < 1e-3, "phi {}", a.phi);
        // degenerate tables are rejected
        assert!(TabulatedRate::new(vec![0.0f64, 1.0], vec![0.0, 1.0]).is_err());
        assert!(TabulatedRate::new(vec![0.0f64, 0.0, 1.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn kernel_energy_rate_reproduces_phase_module() {
        // the REM route to the condensation exponent must agree with the
        // saddle-point route
        let spectrum = SpectralDensity::<f64>::identity();
        let kernel = GammaKernel::gaussian();
        let (alpha, h) = (164f64.ln() / 51.0, 0.9);
        let rate = KernelEnergyRate::new(&spectrum, kernel, h);
        let spec = RemSpec::new(rate, alpha, 51, 1.0);
        let a = analyze(&spec).unwrap();
        assert!(a.condensed);
        let m_phase = crate::phase::m_star(alpha, h, &kernel, &spectrum).unwrap();
        assert!(
            (a.beta_c - m_phase).abs() < 1e-6,
            "REM β_c {} vs phase m* {}",
            a.beta_c,
            m_phase
        );
        // free entropies agree after restoring the kernel prefactors:
        // (1/d)log ρ̂ = −α − ln h + c_γ + (1/d)log Z
        let f_rem = a.phi - alpha - h.ln() + kernel.c_gamma();
        let f_phase = crate::phase::classify(alpha, h, &kernel, &spectrum)
            .unwrap()
            .free_entropy;
        assert!((f_rem - f_phase).abs() < 1e-6, "{f_rem} vs {f_phase}");
    }

    #[test]
    fn simulate_single_term() {
        // n = 1: log Z = −βdε for the single energy, Y_k = 1
        let spec = gaussian_spec(1e-9, 64, 1.0);
        assert_eq!(spec.num_terms(), 1);
        let out = simulate(&spec, &GaussianEnergySampler, 4, 9).unwrap();
        for row in &out.trials {
            assert!((row.log_z_over_d + row.eps_min).abs() < 1e-12);
            assert!((row.y2 - 1.0).abs() < 1e-12);
            assert!((row.y3 - 1.0).abs() < 1e-12);
            assert!(row.entropy_density.abs() < 1e-12);
        }
    }

    #[test]
    fn simulate_is_reproducible_bitwise() {
        let spec = gaussian_spec(0.09, 50, 1.0);
        let a = simulate(&spec, &GaussianEnergySampler, 16, 1234).unwrap();
        let b = simulate(&spec, &GaussianEnergySampler, 16, 1234).unwrap();
        for (x, y) in a.trials.iter().zip(&b.trials) {
            assert_eq!(x.log_z_over_d.to_bits(), y.log_z_over_d.to_bits());
            assert_eq!(x.y2.to_bits(), y.y2.to_bits());
        }
        let c = simulate(&spec, &GaussianEnergySampler, 16, 1235).unwrap();
        assert_ne!(
            a.trials[0].log_z_over_d.to_bits(),
            c.trials[0].log_z_over_d.to_bits()
        );
    }

    #[test]
    fn simulate_honours_term_cap() {
        let spec = gaussian_spec(0.5, 100, 1.0); // e^50 terms
        let err = simulate(&spec, &GaussianEnergySampler, 1, 0).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
    }

    #[test]
    fn entropy_density_vanishes_with_d_in_condensed_phase() {
        // α = 0.06 keeps n = e^{αd} desk-sized at d = 200 while staying
        // deep in the condensed phase (β_c ≈ 0.49 < 1)
        let mut previous = f64::INFINITY;
        for &d in &[50u32, 100, 200] {
            let spec = gaussian_spec(0.06, d, 1.0);
            let out = simulate(&spec, &GaussianEnergySampler, 200, 42).unwrap();
            let mean: f64 =
                out.trials.iter().map(|t| t.entropy_density).sum::<f64>() / 200.0;
            assert!(mean < previous, "entropy density not decreasing at d={d}");
            previous = mean;
        }
        assert!(previous < 0.08, "entropy density still large: {previous}");
    }

    #[test]
    fn exact_minimum_sampler_matches_direct_simulation() {
        // moderate n where both routes are cheap: compare the mean of
        // the minimum from the direct path and the order-stat path
        let spec = gaussian_spec(0.09, 80, 1.0);
        let n = spec.num_terms();
        let direct = simulate(&spec, &GaussianEnergySampler, 400, 7).unwrap();
        let mean_direct: f64 =
            direct.trials.iter().map(|t| t.eps_min).sum::<f64>() / 400.0;
        let mut rng = trial_rng(77, 0);
        let mean_exact: f64 = (0..4000)
            .map(|_| sample_minimum_gaussian_energy(n, 80, &mut rng))
            .sum::<f64>()
            / 4000.0;
        let disagreement = (mean_direct - mean_exact).abs();
        assert!(disagreement < 5e-3, "{mean_direct} vs {mean_exact}");
    }

    #[test]
    fn gumbel_minimum_with_theory_rate() {
        // d(ε_min − ε₀) follows the minimum Gumbel law with rate β_c;
        // β_c is fixed from theory, only the location is fitted.
        let (alpha, d) = (0.09f64, 200u32);
        let a = analyze(&gaussian_spec(alpha, d, 1.0)).unwrap();
        let n = gaussian_spec(alpha, d, 1.0).num_terms();
        let mut rng = trial_rng(5, 0);
        let us: Vec<f64> = (0..4000)
            .map(|_| d as f64 * (sample_minimum_gaussian_energy(n, d, &mut rng) - a.eps0))
            .collect();
        let mean: f64 = us.iter().sum::<f64>() / us.len() as f64;
        let gamma_e = 0.577_215_664_901_532_9;
        let location = mean + gamma_e / a.beta_c;
        let cdf = |u: f64| 1.0 - (-(a.beta_c * (u - location)).exp()).exp();
        let ks = ks_statistic(&us, cdf);
        assert!(ks < 0.05, "KS distance {ks}");
    }

    #[test]
    fn condensed_weight_tail_exponent() {
        // p(z) ~ z^{−(1+β_c/β)} for the renormalized Boltzmann factors
        // z = e^{−βd(ε − ε₀)} near the band edge.
        let (alpha, d, beta) = (0.09f64, 200u32, 1.0f64);
        let a = analyze(&gaussian_spec(alpha, d, beta)).unwrap();
        let n = gaussian_spec(alpha, d, beta).num_terms();
        let mut rng = trial_rng(11, 0);
        let mut zs = Vec::new();
        for _ in 0..600 {
            for eps in sample_smallest_gaussian_energies(n, 200, d, &mut rng) {
                zs.push((-beta * d as f64 * (eps - a.eps0)).exp());
            }
        }
        let fit = hill_tail_fit(&zs, 0.02, 0.0, 500).unwrap();
        assert!(
            (fit.exponent - a.beta_c).abs() < 0.1,
            "tail index {} vs β_c {}",
            fit.exponent,
            a.beta_c
        );
    }

    #[test]
    fn log_z_concentrates_on_phi_small_scale() {
        // quick version of the acceptance check, both phases at d = 100
        for &(beta, tol) in &[(0.5f64, 0.02), (1.0, 0.05)] {
            let spec = gaussian_spec(0.09, 100, beta);
            let a = analyze(&spec).unwrap();
            let out = simulate(&spec, &GaussianEnergySampler, 300, 2024).unwrap();
            let m = moments(&out.trials.iter().map(|t| t.log_z_over_d).collect::<Vec<_>>());
            assert!(
                (m.mean - a.phi).abs() < tol,
                "beta={beta}: mean {} vs phi {}",
                m.mean,
                a.phi
            );
        }
    }
}
