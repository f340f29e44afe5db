use std::collections::BTreeMap;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Coefficient, Rational};
use crate::scalars::{LaurentSeries, LogNorm};

use super::element::{Domain, TwistedElement};

/// A word over the letters `0..n`.
pub type Word = Vec<u32>;

/// Element of the free algebra `K<T_1, ..., T_n>`: a finite sum of words.
#[derive(Clone, Debug)]
pub struct FreeElement<C> {
    letters: usize,
    terms: BTreeMap<Word, LaurentSeries<C>>,
}

impl<C: Coefficient> FreeElement<C> {
    pub fn zero(letters: usize) -> Self {
        FreeElement { letters, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(letters: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, LaurentSeries<C>)>,
    {
        let mut out = Self::zero(letters);
        for (w, c) in terms {
            if let Some(&bad) = w.iter().find(|&&l| l as usize >= letters) {
                return Err(Error::Precondition(format!("letter {bad} outside alphabet of {letters}")));
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    pub fn word(letters: usize, w: Word, precision: i64) -> Result<Self> {
        Self::from_terms(letters, [(w, LaurentSeries::one(precision))])
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LaurentSeries<C>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: LaurentSeries<C>) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&w) {
            Some(prev) => prev + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.letters != other.letters {
            return Err(Error::Incompatible(format!(
                "alphabets of size {} and {}",
                self.letters, other.letters
            )));
        }
        Ok(())
    }

    /// Concatenation convolution.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.letters);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca * cb);
            }
        }
        Ok(out)
    }

    /// Image under the algebra map sending letter `i` to `images[i]`.
    pub fn substitute(&self, images: &[TwistedElement<C>]) -> Result<TwistedElement<C>> {
        if images.len() != self.letters {
            return Err(Error::Dimension { expected: self.letters, got: images.len() });
        }
        let algebra = images
            .first()
            .ok_or_else(|| Error::Precondition("substitution needs at least one image".into()))?
            .algebra()
            .clone();
        let domain = if images.iter().any(|x| x.domain() == Domain::Torus) { Domain::Torus } else { Domain::Polydisc };
        let mut out = algebra.zero(domain);
        for (w, c) in &self.terms {
            let mut term = algebra.one(domain);
            for &l in w {
                term = term.try_mul(&images[l as usize])?;
            }
            out = out.try_add(&term.scale(c))?;
        }
        Ok(out)
    }

    /// `max_w (log|a_w| + sum of log r over the letters of w)`.
    pub fn gauss_norm(&self, r: &[Rational]) -> Result<LogNorm> {
        if r.len() != self.letters {
            return Err(Error::Dimension { expected: self.letters, got: r.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(w, c)| {
                let weight = w
                    .iter()
                    .fold(Rational::from_integer(0.into()), |acc, &l| acc + &r[l as usize]);
                c.lognorm().shift(&weight)
            })
            .max()
            .unwrap_or(LogNorm::Bottom))
    }
}

impl<C: Coefficient> PartialEq for FreeElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(w, c)| other.terms.get(w) == Some(c))
    }
}

impl<C: Coefficient> Mul for &FreeElement<C> {
    type Output = FreeElement<C>;
    fn mul(self, rhs: Self) -> FreeElement<C> {
        self.try_mul(rhs).expect("alphabet mismatch")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct FreeRepr<C: Coefficient> {
    letters: usize,
    terms: Vec<(Word, LaurentSeries<C>)>,
}

impl<C: Coefficient> Serialize for FreeElement<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FreeRepr {
            letters: self.letters,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for FreeElement<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FreeRepr::<C>::deserialize(d)?;
        FreeElement::from_terms(repr.letters, repr.terms).map_err(serde::de::Error::custom)
    }
}
