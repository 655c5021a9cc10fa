//! Shared oracle machinery for the integration tests.
//!
//! Everything here is deliberately independent of the library's own
//! solver pipeline: the incomplete-gamma / noncentral-χ² code below
//! computes distance distributions from special functions alone, so it
//! can sit in judgement of the rate-function route.

#![allow(dead_code)]

use hdkde::numeric::logsumexp;

/// ln of the regularized lower incomplete gamma P(a, x), by the rising
/// series P(a,x) = x^a e^{−x}/Γ(a+1) Σ_k x^k / ((a+1)...(a+k)).
/// Accurate for x ≲ a (the left tail, which is all the oracle needs)
/// and stable in log space down to ln P ≈ −10⁶.
pub fn ln_reg_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    assert!(
        x < a + 1.0,
        "series form needs x < a+1 (left tail), got a={a} x={x}"
    );
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0f64;
    loop {
        term *= x / (a + k);
        sum += term;
        if term < sum * 1e-17 || k > 1e7 {
            break;
        }
        k += 1.0;
    }
    a * x.ln() - x - libm::lgamma(a + 1.0) + sum.ln()
}

/// ln of the regularized upper incomplete gamma Q(a, x) by the Lentz
/// continued fraction; companion to the series for the x ≳ a side.
pub fn ln_reg_upper_gamma(a: f64, x: f64) -> f64 {
    assert!(x > 0.0 && x >= a + 1.0, "continued fraction needs x >= a+1");
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    a * x.ln() - x - libm::lgamma(a) + h.ln()
}

/// ln P(a, x) on the full positive axis.
pub fn ln_reg_lower_gamma_full(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x < a + 1.0 {
        ln_reg_lower_gamma(a, x)
    } else {
        f64::ln_1p(-ln_reg_upper_gamma(a, x).exp().min(1.0 - 1e-16))
    }
}

/// ln CDF of the noncentral χ²(dof, δ²), i.e. of |x − y|² with y
/// standard normal and |x|² = δ².
///
/// Decomposes along the query direction: with r = δ, v the parallel
/// normal coordinate and a central χ²(dof−1) orthogonal part,
///
/// F(s) = ∫ φ(v) P((dof−1)/2, (s − (v−r)²)/2) dv over |v − r| < √s,
///
/// evaluated on a dense v-grid with log-sum-exp. Unlike the Poisson
/// mixture form, this stays accurate arbitrarily deep in the left tail
/// (ln F ≈ −400 is routine for the order-statistics oracle).
pub fn ln_noncentral_chi_sq_cdf(s: f64, dof: f64, delta_sq: f64) -> f64 {
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let r = delta_sq.sqrt();
    let half = (dof - 1.0) / 2.0;
    let root = s.sqrt();
    let steps = 4000usize;
    let dv = 2.0 * root / steps as f64;
    let ln_norm = -0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut terms = Vec::with_capacity(steps);
    for i in 0..steps {
        let v = r - root + (i as f64 + 0.5) * dv;
        let residual = s - (v - r) * (v - r);
        if residual <= 0.0 {
            continue;
        }
        let x = residual / 2.0;
        terms.push(ln_norm - 0.5 * v * v + ln_reg_lower_gamma_full(half, x));
    }
    logsumexp(&terms) + dv.ln()
}

/// Exact E[min_i |x−y_i|²/d] for n iid y ~ N(0, I_d) at a fixed query
/// with |x|² = delta_sq: the minimum of n noncentral-χ²(d, δ²) draws,
/// integrated as E = (1/d)∫ (1−F(s))^n ds over the survival function.
pub fn expected_min_scaled_distance(n: f64, d: u32, delta_sq: f64) -> f64 {
    let dof = d as f64;
    // locate the drop region: n F(s*) = 1
    let ln_n = n.ln();
    let mut lo = 1e-9;
    let mut hi = dof + delta_sq; // mixture mean, where F is order 1/2
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_n + ln_noncentral_chi_sq_cdf(mid, dof, delta_sq) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_star = 0.5 * (lo + hi);
    // integrate exp(n ln(1−F)) with a dense trapezoid around the drop
    let upper = (s_star * 3.0).max(s_star + 40.0);
    let steps = 6000usize;
    let ds = upper / steps as f64;
    let mut acc = 0.0;
    for i in 0..steps {
        let s = (i as f64 + 0.5) * ds;
        let ln_f = ln_noncentral_chi_sq_cdf(s, dof, delta_sq);
        let survival = if ln_f >= 0.0 {
            0.0
        } else if ln_f > -30.0 {
            let f = ln_f.exp();
            (n * (1.0 - f).ln()).exp()
        } else {
            // 1−F ≈ e^{−nF}; nF in log space avoids underflow
            (-(ln_n + ln_f).exp()).exp()
        };
        acc += survival * ds;
        if survival < 1e-14 && s > s_star {
            break;
        }
    }
    acc / dof
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn incomplete_gamma_against_known_values() {
        // P(1, x) = 1 − e^{−x}, covering both the series and the
        // continued-fraction branches
        for &x in &[0.1, 0.5, 1.0, 1.9, 2.5, 7.0, 30.0] {
            let p = ln_reg_lower_gamma_full(1.0, x).exp();
            assert!((p - (1.0 - (-x).exp())).abs() < 1e-12, "x={x}");
        }
        // χ²_2 CDF at its median
        let p = ln_reg_lower_gamma(1.0, 2f64.ln()).exp();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noncentral_cdf_sanity() {
        // central special case δ² → 0 against the plain χ² CDF
        let a = ln_noncentral_chi_sq_cdf(9.0, 10.0, 1e-12).exp();
        let b = ln_reg_lower_gamma_full(5.0, 4.5).exp();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        // mixture median must sit near dof + δ²
        let med = ln_noncentral_chi_sq_cdf(102.0, 51.0, 51.0).exp();
        assert!(med > 0.3 && med < 0.7, "median region {med}");
    }
}
