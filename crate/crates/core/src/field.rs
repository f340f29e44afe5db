//! The coefficient field of the truncated Laurent series.
//!
//! Everything above the scalar layer is written against [`Coefficient`], so
//! the same series, twisted algebra and free algebra code runs over
//! `BigRational` (the default, exact), `Rational64`, or a float type when
//! approximate experiments are wanted.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self;

    fn parse_coeff(s: &str) -> Option<Self>;
}

impl<T> Coefficient for T
where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + FromPrimitive
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn from_int(n: i64) -> Self {
        T::from_i64(n).expect("integer not representable in coefficient type")
    }

    fn parse_coeff(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

/// Exact rational numbers used for log-norms, log-radii and base points.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse().ok()
}

pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
