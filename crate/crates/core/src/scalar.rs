use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Default + Display + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the type cannot represent it at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar literal out of range")
    }

    fn from_count(x: usize) -> Self {
        Self::from_usize(x).expect("count out of scalar range")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
