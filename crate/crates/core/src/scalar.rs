//! Scalar abstraction so the whole pipeline can run at f32 or f64.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// Implemented by `f32` and `f64`; all public types default to `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + fmt::Display + fmt::Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Sum<T> + fmt::Display + fmt::Debug + Send + Sync + 'static
{
}

/// Converts an f64 constant into the working scalar type.
pub(crate) fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("constant representable in scalar type")
}

/// Lossy view of a scalar as f64, for error messages and reports.
pub(crate) fn as_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
