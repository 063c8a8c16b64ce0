//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or measurement into `Self`, rounding if needed.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Real type")
    }

    /// Lossless widening for serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real values convert to f64")
    }

    /// Smallest representable value strictly greater than `self` (for finite inputs).
    fn next_up(self) -> Self;
}

impl Real for f64 {
    fn next_up(self) -> Self {
        f64::next_up(self)
    }
}

impl Real for f32 {
    fn next_up(self) -> Self {
        f32::next_up(self)
    }
}
