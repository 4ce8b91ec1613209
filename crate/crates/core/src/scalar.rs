//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as a quaternion component.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Squared norms at or below this value are treated as a pole by
    /// [`Quaternion::inverse`](crate::Quaternion::inverse).
    fn div_epsilon() -> Self;

    /// Converts an `f64` literal. Panics only if the literal does not fit the type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count out of range for scalar type")
    }
}

impl Real for f64 {
    #[inline]
    fn div_epsilon() -> Self {
        1e-300
    }
}

impl Real for f32 {
    // Smallest normal f32 is ~1.18e-38.
    #[inline]
    fn div_epsilon() -> Self {
        1e-37
    }
}

/// Coordinate of sample `i` of `n` corner-aligned samples spanning `[lo, hi]`.
///
/// Evaluated about the interval midpoint so that samples mirrored through the
/// center of a symmetric interval are exact negatives of each other.
#[inline]
pub fn grid_coord<T: Real>(lo: T, hi: T, i: usize, n: usize) -> T {
    if n < 2 {
        return lo;
    }
    if i == 0 {
        return lo;
    }
    if i == n - 1 {
        return hi;
    }
    let two = T::lit(2.0);
    let mid = (lo + hi) / two;
    let half = (hi - lo) / two;
    let offset = T::from_count(2 * i) - T::from_count(n - 1);
    mid + half * offset / T::from_count(n - 1)
}
