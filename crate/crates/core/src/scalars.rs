//! Truncated formal Laurent series in `t`, the base field `K = Q((t))`.
//!
//! A [`LaurentSeries`] is known modulo `t^N` where `N` is its absolute
//! precision. Every stored exponent is below `N`. Precision is tracked
//! pessimistically: a sum is known to the smaller of the two precisions, and
//! a product additionally loses whatever a negative valuation of the other
//! factor costs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{int, Coefficient, Rational};

/// Default t-adic precision, overridable through `QTATE_PRECISION`.
pub const DEFAULT_PRECISION: i64 = 16;

pub fn default_precision() -> i64 {
    std::env::var("QTATE_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_PRECISION)
}

#[derive(Clone, Debug)]
pub struct LaurentSeries<C> {
    terms: BTreeMap<i64, C>,
    precision: i64,
}

impl<C: Coefficient> LaurentSeries<C> {
    pub fn zero(precision: i64) -> Self {
        LaurentSeries { terms: BTreeMap::new(), precision }
    }

    pub fn one(precision: i64) -> Self {
        Self::constant(C::one(), precision)
    }

    pub fn constant(c: C, precision: i64) -> Self {
        Self::monomial(c, 0, precision)
    }

    pub fn from_int(n: i64, precision: i64) -> Self {
        Self::constant(C::from_int(n), precision)
    }

    pub fn monomial(c: C, exp: i64, precision: i64) -> Self {
        Self::from_terms([(exp, c)], precision)
    }

    /// The uniformizer `t`.
    pub fn t(precision: i64) -> Self {
        Self::monomial(C::one(), 1, precision)
    }

    /// Builds a series from `(exponent, coefficient)` pairs, summing repeated
    /// exponents and dropping anything at or beyond the precision.
    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I, precision: i64) -> Self {
        let mut map: BTreeMap<i64, C> = BTreeMap::new();
        for (e, c) in terms {
            if e >= precision {
                continue;
            }
            let slot = map.entry(e).or_insert_with(C::zero);
            *slot = slot.clone() + c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentSeries { terms: map, precision }
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Least exponent with a nonzero coefficient; `None` stands for `+inf`.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn lognorm(&self) -> LogNorm {
        match self.valuation() {
            Some(v) => LogNorm::Finite(int(-v)),
            None => LogNorm::Bottom,
        }
    }

    /// Reduces the precision; never raises it.
    pub fn truncate(&self, precision: i64) -> Self {
        let p = precision.min(self.precision);
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())), p)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(e, a)| (*e, a.clone() * c.clone())),
            self.precision,
        )
    }

    /// Multiplies by `t^k`, shifting the precision along.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(e, a)| (*e + k, a.clone())),
            self.precision + k,
        )
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }

    /// Product with an explicit precision check; `*` is lenient and takes
    /// the minimum.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.precision != other.precision {
            return Err(Error::Precision(format!(
                "{} vs {}",
                self.precision, other.precision
            )));
        }
        Ok(self * other)
    }

    fn product_precision(&self, other: &Self) -> i64 {
        let mut p = self.precision.min(other.precision);
        if let Some(vb) = other.valuation() {
            p = p.min(self.precision + vb);
        }
        if let Some(va) = self.valuation() {
            p = p.min(other.precision + va);
        }
        p
    }

    /// Multiplicative inverse. For `val(a) = v` the result is known modulo
    /// `t^(N - 2v)` (capped at `N`).
    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation().ok_or(Error::ZeroDivisor(self.precision))?;
        let unit_len = self.precision - v;
        let u: Vec<C> = (0..unit_len).map(|k| self.coeff(v + k)).collect();
        let lead_inv = C::one() / u[0].clone();
        let mut b: Vec<C> = Vec::with_capacity(unit_len as usize);
        b.push(lead_inv.clone());
        for k in 1..unit_len as usize {
            let mut acc = C::zero();
            for j in 1..=k {
                if !u[j].is_zero() {
                    acc = acc + u[j].clone() * b[k - j].clone();
                }
            }
            b.push(-(acc * lead_inv.clone()));
        }
        let precision = self.precision.min(self.precision - 2 * v);
        Ok(Self::from_terms(
            b.into_iter().enumerate().map(|(k, c)| (k as i64 - v, c)),
            precision,
        ))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut result = Self::one(self.precision);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }
}

impl<C: Coefficient> PartialEq for LaurentSeries<C> {
    /// Equality modulo the smaller of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl<C: Coefficient> Add for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn add(self, rhs: Self) -> LaurentSeries<C> {
        let p = self.precision.min(rhs.precision);
        LaurentSeries::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(e, c)| (*e, c.clone())),
            p,
        )
    }
}

impl<C: Coefficient> Sub for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn sub(self, rhs: Self) -> LaurentSeries<C> {
        let p = self.precision.min(rhs.precision);
        LaurentSeries::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.clone()))
                .chain(rhs.terms.iter().map(|(e, c)| (*e, -c.clone()))),
            p,
        )
    }
}

impl<C: Coefficient> Neg for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn neg(self) -> LaurentSeries<C> {
        LaurentSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            precision: self.precision,
        }
    }
}

impl<C: Coefficient> Mul for &LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn mul(self, rhs: Self) -> LaurentSeries<C> {
        let p = self.product_precision(rhs);
        let (Some(va), Some(vb)) = (self.valuation(), rhs.valuation()) else {
            return LaurentSeries::zero(p);
        };
        let base = va + vb;
        let len = (p - base).max(0) as usize;
        let mut acc: Vec<C> = vec![C::zero(); len];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let k = (ea + eb - base) as usize;
                if k >= len {
                    break;
                }
                let prev = std::mem::replace(&mut acc[k], C::zero());
                acc[k] = prev + ca.clone() * cb.clone();
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (base + k as i64, c))
            .collect();
        LaurentSeries { terms, precision: p }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Coefficient> $tr for LaurentSeries<C> {
            type Output = LaurentSeries<C>;
            fn $m(self, rhs: Self) -> LaurentSeries<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coefficient> Neg for LaurentSeries<C> {
    type Output = LaurentSeries<C>;
    fn neg(self) -> LaurentSeries<C> {
        -&self
    }
}

impl<C: Coefficient> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match *e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{e}")?,
            }
        }
        Ok(())
    }
}

/// `log|x|` as an exact rational; `Bottom` is `log|0|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogNorm {
    Bottom,
    Finite(Rational),
}

impl LogNorm {
    pub fn zero() -> Self {
        LogNorm::Finite(int(0))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            LogNorm::Bottom => None,
            LogNorm::Finite(r) => Some(r),
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, LogNorm::Bottom)
    }

    /// Adds a rational offset (multiplication of the norm by `e^x`).
    pub fn shift(&self, x: &Rational) -> LogNorm {
        match self {
            LogNorm::Bottom => LogNorm::Bottom,
            LogNorm::Finite(r) => LogNorm::Finite(r + x),
        }
    }

    pub fn to_json_string(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "-inf" {
            Some(LogNorm::Bottom)
        } else {
            crate::field::parse_rational(s).map(LogNorm::Finite)
        }
    }
}

impl Add for &LogNorm {
    type Output = LogNorm;
    fn add(self, rhs: Self) -> LogNorm {
        match (self, rhs) {
            (LogNorm::Finite(a), LogNorm::Finite(b)) => LogNorm::Finite(a + b),
            _ => LogNorm::Bottom,
        }
    }
}

impl Add for LogNorm {
    type Output = LogNorm;
    fn add(self, rhs: Self) -> LogNorm {
        &self + &rhs
    }
}

impl fmt::Display for LogNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogNorm::Bottom => write!(f, "-inf"),
            LogNorm::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for LogNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LogNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LogNorm::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad lognorm {s:?}")))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    terms: Vec<(i64, String)>,
    #[serde(default = "default_precision")]
    precision: i64,
}

impl<C: Coefficient> Serialize for LaurentSeries<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect(),
            precision: self.precision,
        }
        .serialize(s)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for LaurentSeries<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (e, s) in repr.terms {
            let c = C::parse_coeff(&s)
                .ok_or_else(|| serde::de::Error::custom(format!("bad coefficient {s:?}")))?;
            terms.push((e, c));
        }
        Ok(LaurentSeries::from_terms(terms, repr.precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::Scalar;

    fn poly(cs: &[(i64, i64)], n: i64) -> Scalar {
        Scalar::from_terms(cs.iter().map(|&(e, c)| (e, int(c))), n)
    }

    #[test]
    fn product_of_conjugates() {
        let a = poly(&[(0, 1), (1, 1)], 5);
        let b = poly(&[(0, 1), (1, -1)], 5);
        assert_eq!(&a * &b, poly(&[(0, 1), (2, -1)], 5));
    }

    #[test]
    fn valuation_adds() {
        let t = Scalar::t(16);
        let t2 = t.pow(2).unwrap();
        assert_eq!((&t * &t2).valuation(), Some(3));
    }

    #[test]
    fn q_close_to_one() {
        let q = poly(&[(0, 1), (1, 1)], 16);
        let one = Scalar::one(16);
        let d = &one - &q;
        assert_eq!(d.valuation(), Some(1));
        assert_eq!(d.lognorm(), LogNorm::Finite(int(-1)));
        assert!(d.lognorm() < LogNorm::zero());
    }

    #[test]
    fn geometric_inverse() {
        let a = poly(&[(0, 1), (1, 1)], 5);
        let inv = a.inv().unwrap();
        assert_eq!(inv, poly(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1)], 5));
        assert_eq!(inv.precision(), 5);
    }

    #[test]
    fn inverse_of_uniformizer() {
        let inv = Scalar::t(5).inv().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.terms().count(), 1);
        assert_eq!(inv.coeff(-1), int(1));
    }

    #[test]
    fn inverse_with_non_unit_constant() {
        let a = poly(&[(0, 2), (1, 1)], 3);
        let inv = a.inv().unwrap();
        assert_eq!(inv.coeff(0), rat(1, 2));
        assert_eq!(inv.coeff(1), rat(-1, 4));
        assert_eq!(inv.coeff(2), rat(1, 8));
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn zero_has_no_inverse() {
        let z = Scalar::from_terms([(7, int(1))], 5);
        assert!(z.is_zero());
        assert_eq!(z.inv(), Err(Error::ZeroDivisor(5)));
        assert_eq!(z.lognorm(), LogNorm::Bottom);
    }

    #[test]
    fn lognorm_examples() {
        assert_eq!(Scalar::t(8).lognorm(), LogNorm::Finite(int(-1)));
        assert_eq!(poly(&[(0, 3), (1, 5)], 8).lognorm(), LogNorm::zero());
    }

    #[test]
    fn checked_mul_rejects_mismatch() {
        assert!(Scalar::t(4).checked_mul(&Scalar::t(5)).is_err());
    }

    #[test]
    fn negative_valuation_costs_precision() {
        let tinv = Scalar::t(10).inv().unwrap();
        let x = poly(&[(0, 1), (3, 2)], 10);
        assert_eq!((&tinv * &x).precision(), 8);
    }

    #[test]
    fn bottom_absorbs() {
        let a = LogNorm::Finite(int(3));
        assert_eq!(&a + &LogNorm::Bottom, LogNorm::Bottom);
        assert!(LogNorm::Bottom < LogNorm::Finite(int(-1000)));
    }

    #[test]
    fn json_layout() {
        let a = Scalar::from_terms([(2, rat(-3, 4)), (0, int(1))], 6);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"terms":[[0,"1"],[2,"-3/4"]],"precision":6}"#);
        let back: Scalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
