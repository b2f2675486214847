//! Floating-point abstraction shared by the numeric kernels.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Real scalar usable by the divergence, pooling, fusion and statistics code.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Default + Send + Sync + 'static
{
    /// Tolerance used when checking that a vector lies on the probability simplex.
    fn simplex_tolerance() -> Self;

    /// Shorthand for lossless-enough conversion of small literals.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn simplex_tolerance() -> Self {
        1e-4
    }
}

impl Scalar for f64 {
    fn simplex_tolerance() -> Self {
        1e-9
    }
}
