//! Bracketing one-dimensional solvers.
//!
//! Every root in the library goes through plain bisection on a sign
//! change: each function evaluation is itself an inner solve, so
//! robustness and determinism win over iteration counts. Same inputs
//! give bit-identical outputs.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Bisect `f` on `[lo, hi]`, which must bracket a sign change.
///
/// Stops when the interval width falls below `tol` (absolute) and
/// returns the midpoint.
pub fn bisect<T: Real>(
    op: &'static str,
    mut f: impl FnMut(T) -> T,
    mut lo: T,
    mut hi: T,
    tol: T,
) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::BracketFailure {
            op,
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    // 200 halvings are enough to exhaust f64 resolution on any bracket.
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if hi - lo < tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == T::zero() {
            return Ok(mid);
        }
        if (fmid > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * lit(0.5))
}

/// Scan `[lo, hi]` geometrically with `points` nodes and return the
/// first sub-interval on which `f` changes sign.
pub fn bracket_geometric<T: Real>(
    mut f: impl FnMut(T) -> T,
    lo: T,
    hi: T,
    points: usize,
) -> Option<(T, T)> {
    debug_assert!(lo > T::zero() && hi > lo && points >= 2);
    let ratio = (hi / lo).ln() / lit(points as f64 - 1.0);
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for k in 1..points {
        let x = lo * (ratio * lit(k as f64)).exp();
        let fx = f(x);
        if f_prev.is_finite() && fx.is_finite() {
            if f_prev == T::zero() {
                return Some((x_prev, x_prev));
            }
            if (fx <= T::zero()) != (f_prev <= T::zero()) {
                return Some((x_prev, x));
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    None
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. Tolerance is absolute in the argument.
pub fn golden_max<T: Real>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let inv_phi: T = lit(0.618_033_988_749_894_9);
    let mut c = hi - (hi - lo) * inv_phi;
    let mut d = lo + (hi - lo) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * inv_phi;
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * inv_phi;
            fd = f(d);
        }
    }
    let mid = (lo + hi) * lit(0.5);
    (mid, f(mid))
}
