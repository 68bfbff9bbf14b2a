//! Floating point abstraction used by every map-producing routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Channel value type: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// The saturation level of a guidance channel.
    fn max_level() -> Self {
        Self::of(255.0)
    }

    /// Lossy conversion from `f64`; exact for integers below 2^24.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 converts to any float")
    }

    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize converts to any float")
    }

    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
