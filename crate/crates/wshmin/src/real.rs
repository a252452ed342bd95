//! Abstraction over the two arithmetic backends (f64, double-double).
//!
//! The numeric kernels in this crate are written once, generic over [`Real`],
//! and instantiated for plain f64 (standard precision) or
//! [`DoubleDouble`](crate::dd::DoubleDouble) (extended precision). The trait
//! deliberately covers only what those kernels need.

use crate::dd::DoubleDouble;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Significant decimal digits carried by the format.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: Self) -> Self;
    fn is_finite(self) -> bool;

    /// Relative spacing of representable values near 1.
    fn epsilon() -> f64;

    fn pi() -> Self;

    fn max_val(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }

    fn min_val(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn powf(self, p: Self) -> Self {
        f64::powf(self, p)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn epsilon() -> f64 {
        f64::EPSILON
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

impl Real for DoubleDouble {
    const DIGITS: u32 = 31;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    #[inline]
    fn powf(self, p: Self) -> Self {
        DoubleDouble::powf(self, p)
    }
    #[inline]
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
    #[inline]
    fn epsilon() -> f64 {
        DoubleDouble::EPSILON
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_discriminant<R: Real>(b_over_a: f64, c_over_a: f64) -> f64 {
        let b = R::from_f64(b_over_a);
        let c = R::from_f64(c_over_a);
        (b * b - R::from_f64(4.0) * c).to_f64()
    }

    #[test]
    fn backends_agree_when_well_conditioned() {
        let d_f64 = quadratic_discriminant::<f64>(3.0, 2.0);
        let d_dd = quadratic_discriminant::<DoubleDouble>(3.0, 2.0);
        assert_eq!(d_f64, 1.0);
        assert_eq!(d_dd, 1.0);
    }

    #[test]
    fn dd_survives_cancellation_f64_does_not() {
        // b^2 and 4c agree to ~12 digits; the cross term 2^-80 needs the
        // low word. All quantities here are exactly representable.
        let e = 2f64.powi(-40);
        let exact = 2f64.powi(-39) + 2f64.powi(-80);
        let d_f64 = quadratic_discriminant::<f64>(1.0 + e, 0.25);
        let d_dd = quadratic_discriminant::<DoubleDouble>(1.0 + e, 0.25);
        assert_eq!(d_f64, 2f64.powi(-39)); // f64 drops the cross term
        assert_eq!(d_dd, exact);
    }

    #[test]
    fn epsilon_ordering() {
        assert!(<DoubleDouble as Real>::epsilon() < <f64 as Real>::epsilon());
        assert!(DoubleDouble::DIGITS > <f64 as Real>::DIGITS);
    }

    #[test]
    fn pi_consistency() {
        let dd_pi = <DoubleDouble as Real>::pi();
        assert_eq!(dd_pi.to_f64(), std::f64::consts::PI);
    }
}
