//! Scalar abstraction shared by the numerical kernels.

use nalgebra as na;
use num_traits as nt;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point type the simulator can run on (`f32` or `f64`).
///
/// Elementary functions (`sqrt`, `sin`, `cos`, `abs`, ...) come from
/// [`nalgebra::RealField`]; conversions come from `num-traits`.
pub trait Real:
    Copy
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + na::RealField
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 is representable in every Real type")
    }

    fn as_f64(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).expect("Real values convert to f64")
    }

    fn count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Unit roundoff of the type, widened to `f64`.
    const EPSILON: f64;
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}
