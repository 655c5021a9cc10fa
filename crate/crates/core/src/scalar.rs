//! Floating-point abstraction used by the analytic layer.
//!
//! All closed-form theory (kernels, spectra, saddle points, phase
//! boundaries, KL curves, REM analysis) is generic over [`Real`], with
//! `f32` and `f64` implementations provided. The Monte-Carlo layer is
//! `f64` only: it is bound to the random-number stack and there is no
//! reason to run simulations in reduced precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Scalar type for the analytic computations.
///
/// Everything here is `num_traits` plumbing except the two special
/// functions, which are routed through `libm` so results do not depend
/// on the platform libc.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Natural log of the Gamma function.
    fn ln_gamma(self) -> Self;

    /// Complementary error function.
    fn erfc(self) -> Self;
}

impl Real for f64 {
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }

    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    // f32 goes through the f64 kernels: cheaper than dedicated f32
    // polynomials and accurate to full f32 precision.
    fn ln_gamma(self) -> Self {
        libm::lgamma(self as f64) as f32
    }

    fn erfc(self) -> Self {
        libm::erfc(self as f64) as f32
    }
}

/// Shorthand for lifting an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}
