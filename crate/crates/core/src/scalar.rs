//! The coefficient field shared by every module.
//!
//! All algebra in this crate is written once against [`Scalar`]. Exact
//! identities are checked with [`Rational`] coefficients; `f64` is used for
//! the operator models and eigenvalue work, where exactness is impossible.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, NumAssign, Signed, ToPrimitive};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field usable as coefficient ring for series, matrices and functionals.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact (zero tests are then meaningful).
    const EXACT: bool;

    /// `num / den`; panics on `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Product without consuming either operand.
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Lossy conversion for eigenvalue work and reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact for rationals, nearest value for floats.
    fn from_rational(r: &Rational) -> Self;

    /// Zero test: exact for rationals, below `1e-12` in absolute value for floats.
    fn is_negligible(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs().to_f64_lossy() < 1e-12
        }
    }

    /// Square root, when the field has one. Rationals return `None` unless
    /// the value is a perfect square.
    fn try_sqrt(&self) -> Option<Self>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        (num as f64 / den as f64) as f32
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

/// Shorthand for `Rational::from_ratio`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Converts between scalar types through `f64` (lossy for rationals).
pub fn cast<S: Scalar, T: Scalar>(x: &S) -> T {
    T::from_f64(x.to_f64_lossy()).expect("finite value")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(q(9, 4).try_sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).try_sqrt(), None);
        assert_eq!(q(-1, 1).try_sqrt(), None);
    }

    #[test]
    fn ratio_constructor_reduces() {
        assert_eq!(q(6, 4), q(3, 2));
        assert!((f64::from_ratio(1, 4) - 0.25).abs() < 1e-15);
    }
}
