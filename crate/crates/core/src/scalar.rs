//! Floating-point scalar abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is
    /// representable in both `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index out of range")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sign(x)·|x|^q`: odd power extension used inside Newton iterations so the
/// nonlinearities stay smooth across small undershoots below zero.
#[inline]
pub(crate) fn signed_pow<T: Real>(x: T, q: T) -> T {
    if x < T::zero() {
        -(-x).powf(q)
    } else {
        x.powf(q)
    }
}

/// Relative closeness used for analytic boundaries (`β = σ + 1`, integer tests).
#[inline]
pub(crate) fn rel_eq<T: Real>(a: T, b: T, rel: T) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(T::one())
}
