use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point scalar used for parameters and estimates: `f32` or `f64`.
///
/// Integer quantities (positions, counts, exact costs) stay integral; only
/// the real-valued side of the estimators goes through this trait.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossless for the small literals used as constants in this crate.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal representable")
    }

    fn from_count(x: usize) -> Self {
        <Self as NumCast>::from(x).expect("count representable")
    }

    /// `ceil(self)` as a count; negative values and NaN map to 0.
    fn ceil_count(self) -> usize {
        let c = self.ceil();
        if c.is_nan() || c <= Self::zero() {
            0
        } else {
            c.to_usize().unwrap_or(usize::MAX)
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ceil(log2(x))` for a positive integer, computed exactly.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x > 0, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
