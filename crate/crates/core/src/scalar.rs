//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: implemented for `f32` and `f64`.
///
/// All tolerances in the crate are written as `f64` literals and converted
/// with [`Real::c`]; for `f32` they are clamped from below by a multiple of
/// machine epsilon (see [`crate::Tolerances`]).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::c(2.0)
    }

    /// `max(v, eps * factor)`: a tolerance that never drops below what the
    /// scalar type can resolve.
    #[inline]
    fn tol(v: f64, eps_factor: f64) -> Self {
        Self::c(v).max(Self::epsilon() * Self::c(eps_factor))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
