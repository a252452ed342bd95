//! Double-double arithmetic: an unevaluated sum of two f64 values carrying
//! roughly 31 significant decimal digits.
//!
//! The representation is canonical: `|lo| <= ulp(hi)/2`, so `hi` is the
//! correctly rounded f64 value of the pair. The error-free transforms
//! (`two_sum`, `two_prod`) follow Dekker and Knuth; `two_prod` uses the fused
//! multiply-add, which is a single hardware instruction on every target this
//! crate supports. Algorithms for the transcendental functions follow the
//! usual accurate-table-free scheme: argument reduction against a
//! double-double `ln 2`, a short Taylor tail, and exact power-of-two
//! rescaling.
//!
//! Only the operations the numeric kernels actually use are provided. This
//! is not a general multiprecision library; for anything beyond ~31 digits
//! use a real one.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Sum `a + b` with exact error term. No magnitude precondition.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Sum `a + b` with exact error term, assuming `|a| >= |b|` or `a == 0`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Product `a * b` with exact error term via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Machine epsilon of the format, 2^-104.
    pub const EPSILON: f64 = 4.93038065763132e-32;

    /// ln 2 to double-double accuracy.
    pub const LN_2: Self = DoubleDouble {
        hi: 6.931471805599452862e-1,
        lo: 2.319046813846299558e-17,
    };

    /// pi to double-double accuracy.
    pub const PI: Self = DoubleDouble {
        hi: 3.141592653589793116e0,
        lo: 1.224646799147353207e-16,
    };

    /// e to double-double accuracy.
    pub const E: Self = DoubleDouble {
        hi: 2.718281828459045091e0,
        lo: 1.445646891729250158e-16,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact sum of two arbitrary f64 values.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        DoubleDouble { hi, lo }
    }

    /// Exact product of two f64 values.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    /// Exact scaling by a power of two (`factor` must be one).
    #[inline]
    pub fn mul_pwr2(self, factor: f64) -> Self {
        DoubleDouble {
            hi: self.hi * factor,
            lo: self.lo * factor,
        }
    }

    /// Exact scaling by 2^n.
    #[inline]
    pub fn ldexp(self, n: i32) -> Self {
        self.mul_pwr2(2.0f64.powi(n))
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }

    pub fn recip(self) -> Self {
        DoubleDouble::ONE / self
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return DoubleDouble::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = DoubleDouble::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// Square root by one f64 seed plus one Newton correction step.
    /// Negative input returns NaN, matching f64 semantics.
    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return DoubleDouble::ZERO;
        }
        if self.hi < 0.0 {
            return DoubleDouble::from_f64(f64::NAN);
        }
        // x approximates 1/sqrt(a); sqrt(a) ~ a*x + (a - (a*x)^2) * x/2.
        let x = 1.0 / self.hi.sqrt();
        let ax = DoubleDouble::from_f64(self.hi * x);
        let err = self - ax.sqr();
        ax + DoubleDouble::from_f64(err.hi * (x * 0.5))
    }

    /// Exponential. Reduction x = m ln2 + 512 r with |r| small, Taylor on r,
    /// nine squarings to undo the 512, exact 2^m rescale.
    pub fn exp(self) -> Self {
        // Beyond these bounds the result over/underflows f64 anyway.
        if self.hi >= 709.8 {
            return DoubleDouble::from_f64(f64::INFINITY);
        }
        if self.hi <= -745.0 {
            return DoubleDouble::ZERO;
        }
        if self.is_zero() {
            return DoubleDouble::ONE;
        }

        let m = (self.hi / Self::LN_2.hi + 0.5).floor();
        let r = (self - Self::LN_2 * m).mul_pwr2(1.0 / 512.0);

        // expm1(r) by Taylor; |r| <= ln2/1024 so ~10 terms reach 2^-104.
        let mut term = r;
        let mut sum = r;
        let mut k = 1.0f64;
        loop {
            k += 1.0;
            term = term * r / DoubleDouble::from_f64(k);
            sum += term;
            if term.hi.abs() < Self::EPSILON * sum.hi.abs() || k > 24.0 {
                break;
            }
        }
        // expm1(2t) = 2 expm1(t) + expm1(t)^2, applied nine times.
        for _ in 0..9 {
            sum = sum.mul_pwr2(2.0) + sum.sqr();
        }
        (sum + DoubleDouble::ONE).ldexp(m as i32)
    }

    /// Natural logarithm by Newton iteration on `exp`:
    /// x <- x + a e^{-x} - 1, doubling correct digits per step.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        let mut x = DoubleDouble::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - DoubleDouble::ONE;
        }
        x
    }

    /// `self^p` for positive `self`.
    pub fn powf(self, p: Self) -> Self {
        (self.ln() * p).exp()
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        DoubleDouble { hi, lo }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: f64) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        DoubleDouble { hi, lo }
    }
}

impl Add<DoubleDouble> for f64 {
    type Output = DoubleDouble;
    #[inline]
    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        rhs + self
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: f64) -> Self {
        self + (-rhs)
    }
}

impl Sub<DoubleDouble> for f64 {
    type Output = DoubleDouble;
    #[inline]
    fn sub(self, rhs: DoubleDouble) -> DoubleDouble {
        -rhs + self
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, rhs.hi);
        p2 += self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, rhs);
        p2 += self.lo * rhs;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }
}

impl Mul<DoubleDouble> for f64 {
    type Output = DoubleDouble;
    #[inline]
    fn mul(self, rhs: DoubleDouble) -> DoubleDouble {
        rhs * self
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        // Long division: three f64 quotient digits, each with an exact
        // remainder update, then renormalize.
        let q1 = self.hi / rhs.hi;
        let mut r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + q3
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, rhs: f64) -> Self {
        self / DoubleDouble::from_f64(rhs)
    }
}

impl Div<DoubleDouble> for f64 {
    type Output = DoubleDouble;
    #[inline]
    fn div(self, rhs: DoubleDouble) -> DoubleDouble {
        DoubleDouble::from_f64(self) / rhs
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Dd = DoubleDouble;

    fn assert_dd_close(x: Dd, hi: f64, lo: f64, tol: f64) {
        let diff = (x - (Dd { hi, lo })).abs();
        let scale = hi.abs().max(1e-300);
        assert!(
            diff.hi <= tol * scale,
            "got {:?}, want ({:e}, {:e}), rel diff {:e}",
            x,
            hi,
            lo,
            diff.hi / scale
        );
    }

    #[test]
    fn error_free_transforms() {
        let (s, e) = two_sum(1e16, 1.0);
        assert_eq!(s + e, 1e16 + 1.0);
        assert_eq!(Dd::from_sum(1e16, 1.0).to_f64(), 1e16 + 1.0);
        let (p, e) = two_prod(1.0 + 2f64.powi(-30), 1.0 + 2f64.powi(-30));
        assert_eq!(p, 1.0 + 2f64.powi(-29)); // squared low part lives in e
        assert_eq!(e, 2f64.powi(-60));
    }

    #[test]
    fn third_round_trip() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * 3.0 - Dd::ONE;
        assert!(back.hi.abs() < 1e-31);
    }

    #[test]
    fn sqrt_two() {
        let r = Dd::from_f64(2.0).sqrt();
        let err = (r.sqr() - Dd::from_f64(2.0)).abs();
        assert!(err.hi < 1e-31);
    }

    #[test]
    fn exp_one_is_e() {
        let e = Dd::ONE.exp();
        assert_dd_close(e, Dd::E.hi, Dd::E.lo, 1e-31);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[1e-8, 0.1, 1.0, 3.5, 42.0, 500.0] {
            let v = Dd::from_f64(x);
            let rt = v.ln().exp();
            let rel = ((rt - v) / v).abs();
            assert!(rel.hi < 5e-31, "x={x}: rel={:e}", rel.hi);
        }
    }

    #[test]
    fn ln_two_matches_constant() {
        let l = Dd::from_f64(2.0).ln();
        assert_dd_close(l, Dd::LN_2.hi, Dd::LN_2.lo, 1e-31);
    }

    #[test]
    fn exp_extremes() {
        assert_eq!(Dd::from_f64(-800.0).exp(), Dd::ZERO);
        assert!(Dd::from_f64(800.0).exp().hi.is_infinite());
    }

    #[test]
    fn powi_matches_mul() {
        let x = Dd::from_f64(1.7);
        let cube = x * x * x;
        let p = x.powi(3);
        assert!(((p - cube) / cube).abs().hi < 1e-31);
        let inv = x.powi(-2) * x.sqr() - Dd::ONE;
        assert!(inv.abs().hi < 1e-30);
    }

    #[test]
    fn powf_consistency() {
        let x = Dd::from_f64(2.0);
        let y = x.powf(Dd::from_f64(10.0));
        assert!(((y - Dd::from_f64(1024.0)) / Dd::from_f64(1024.0))
            .abs()
            .hi
            .abs()
            < 1e-30);
    }

    #[test]
    fn ordering() {
        let a = Dd { hi: 1.0, lo: 1e-20 };
        let b = Dd { hi: 1.0, lo: 2e-20 };
        assert!(a < b);
        assert!(Dd::from_f64(2.0) > b);
    }

    #[test]
    fn mixed_scalar_ops() {
        let x = Dd::from_f64(0.3);
        assert!(((1.0 - x) - Dd::from_f64(0.7)).abs().hi < 1e-16);
        assert!(((2.0 * x) / 2.0 - x).abs().hi < 1e-31);
        assert!(((2.0 / x) * x - Dd::from_f64(2.0)).abs().hi < 1e-31);
    }
}
