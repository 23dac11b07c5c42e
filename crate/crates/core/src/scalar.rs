//! Scalar abstraction shared by the probability arithmetic.
//!
//! Success vectors, affinities and step weightings only need field
//! operations and an ordering, so they are written once against [`Scalar`]
//! and instantiated with `f64`, `f32`, or an exact [`BigRational`].
//! Information-theoretic quantities need logarithms and stay on
//! [`num_traits::Float`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Field-like number type used for probabilities.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Absolute tolerance for probability-level comparisons.
    fn tolerance() -> Self;

    fn from_u64(v: u64) -> Self;

    /// Nearest representable value; exact types keep the binary value of `v`.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }

    /// `|self - other| <= tol`.
    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= *tol
    }

    fn sum<'a, I>(iter: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        iter.into_iter()
            .fold(Self::zero(), |acc, x| acc + x.clone())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    // Neumaier summation: the MC merge and long target sums stay
    // independent of summation order to well below the tolerance.
    fn sum<'a, I>(iter: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &x in iter {
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-4
    }

    fn from_u64(v: u64) -> Self {
        v as f32
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn abs(&self) -> Self {
        f32::abs(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Renders a value as `p/q` when it is an exact dyadic rational with a
/// denominator of at most `2^20`.
pub fn dyadic_fraction(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let r = BigRational::from_float(x)?;
    let den = r.denom();
    if den > &BigInt::from(1u64 << 20) {
        return None;
    }
    if den.is_one() {
        Some(r.numer().to_string())
    } else {
        Some(format!("{}/{}", r.numer(), den))
    }
}

/// Renders an exact rational as `p/q` (or `p` when integral).
pub fn fraction_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
