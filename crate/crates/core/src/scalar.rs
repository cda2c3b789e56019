//! Scalar abstraction: the same matrix and Gram-construction code runs over
//! exact rationals (for identities) and over floats (for eigensolvers).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Field-like scalar used by [`crate::matrix::Matrix`] and the Gram builders.
///
/// `from_ratio` must be exact for exact types and correctly rounded for
/// floats; `abs_f64` is only used for pivot selection and diagnostics.
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this type is exact (no rounding).
    const EXACT: bool;

    /// Complex conjugate; identity for real types.
    fn conj(&self) -> Self;

    /// Construct `num / den` from unsigned big integers.
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self;

    /// Approximate magnitude, for pivoting and reporting.
    fn abs_f64(&self) -> f64;

    /// Approximate value (real part for complex types), for the float boundary.
    fn approx_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        let mag = BigUint::from(v.unsigned_abs());
        let one = BigUint::one();
        let x = Self::from_ratio(&mag, &one);
        if v < 0 {
            -x
        } else {
            x
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        *self
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)
    }

    fn abs_f64(&self) -> f64 {
        self.abs()
    }

    fn approx_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        *self
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        (num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)) as f32
    }

    fn abs_f64(&self) -> f64 {
        f64::from(self.abs())
    }

    fn approx_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().map_or(f64::INFINITY, f64::abs)
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        Complex64::new(f64::from_ratio(num, den), 0.0)
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn approx_f64(&self) -> f64 {
        self.re
    }
}
