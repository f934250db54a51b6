//! The exact coefficient field every algebraic routine is generic over.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num};

/// An exact field of characteristic zero.
///
/// Ranks and valuations are only meaningful when zero tests are exact, so
/// the intended instances are `BigRational` (the default, see
/// [`crate::Rational`]) and fixed-width ratios such as `Ratio<i64>` for
/// small inputs. Floating point types satisfy the bounds but produce
/// meaningless ranks.
pub trait Field:
    Clone + PartialEq + Debug + Display + Num + Neg<Output = Self> + FromPrimitive + Send + Sync
{
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn div_ref(&self, other: &Self) -> Self;

    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer embeds into a characteristic-zero field")
    }
}

impl<T> Field for T
where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Num
        + Neg<Output = T>
        + FromPrimitive
        + Send
        + Sync,
    for<'a> &'a T: Add<&'a T, Output = T>
        + Sub<&'a T, Output = T>
        + Mul<&'a T, Output = T>
        + Div<&'a T, Output = T>,
{
    #[inline]
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    #[inline]
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    #[inline]
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
}
