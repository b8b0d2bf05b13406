use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the entropy computations are generic over: f32 or f64.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for invariant checks (sums, cached stats, identities).
    fn check_tol() -> Self;

    /// Minimum entropy decrease a greedy move must achieve, also used to
    /// decide when two candidate values tie.
    fn move_tol() -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn check_tol() -> Self {
        1e-9
    }

    fn move_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn check_tol() -> Self {
        1e-4
    }

    fn move_tol() -> Self {
        1e-6
    }
}

/// `x * log2(x)` with the `0 * log 0 = 0` convention.
#[inline]
pub fn xlog2x<T: Scalar>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}
