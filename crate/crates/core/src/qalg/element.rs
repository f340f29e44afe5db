use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::TwistForm;
use crate::error::{Error, Result};
use crate::field::{Coefficient, Rational};
use crate::scalars::{LaurentSeries, LogNorm};

pub type Exponent = Vec<i64>;

/// Where the variables live: non-negative exponents only (quantum polydisc)
/// or arbitrary integer exponents (quantum torus).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Polydisc,
    Torus,
}

/// The ambient algebra: a twist form and the deformation parameter `q`.
#[derive(Debug)]
pub struct TwistedAlgebra<C> {
    twist: TwistForm,
    q: LaurentSeries<C>,
    q_inv: LaurentSeries<C>,
    q_powers: Mutex<HashMap<i64, LaurentSeries<C>>>,
}

impl<C: Coefficient> TwistedAlgebra<C> {
    /// Requires `|q| = 1`.
    pub fn new(twist: TwistForm, q: LaurentSeries<C>) -> Result<Arc<Self>> {
        if q.valuation() != Some(0) {
            return Err(Error::Precondition(format!("|q| must be 1, got q = {q}")));
        }
        let q_inv = q.inv()?;
        Ok(Arc::new(TwistedAlgebra { twist, q, q_inv, q_powers: Mutex::new(HashMap::new()) }))
    }

    pub fn twist(&self) -> &TwistForm {
        &self.twist
    }

    pub fn q(&self) -> &LaurentSeries<C> {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.twist.dim()
    }

    pub fn precision(&self) -> i64 {
        self.q.precision()
    }

    pub fn q_pow(&self, k: i64) -> LaurentSeries<C> {
        if k == 0 {
            return LaurentSeries::one(self.q.precision());
        }
        if let Some(v) = self.q_powers.lock().unwrap().get(&k) {
            return v.clone();
        }
        let base = if k > 0 { &self.q } else { &self.q_inv };
        let v = base.pow(k.abs()).expect("non-negative power");
        self.q_powers.lock().unwrap().insert(k, v.clone());
        v
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.twist == other.twist && self.q == other.q
    }

    pub fn zero(self: &Arc<Self>, domain: Domain) -> TwistedElement<C> {
        TwistedElement {
            algebra: self.clone(),
            domain,
            truncation: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(self: &Arc<Self>, domain: Domain) -> TwistedElement<C> {
        self.monomial(vec![0; self.dim()], LaurentSeries::one(self.precision()), domain)
            .expect("unit monomial")
    }

    pub fn monomial(
        self: &Arc<Self>,
        exp: Exponent,
        coeff: LaurentSeries<C>,
        domain: Domain,
    ) -> Result<TwistedElement<C>> {
        self.element([(exp, coeff)], domain, None)
    }

    /// The generator `m(e_i)`.
    pub fn generator(self: &Arc<Self>, i: usize, domain: Domain) -> TwistedElement<C> {
        let mut e = vec![0; self.dim()];
        e[i] = 1;
        self.monomial(e, LaurentSeries::one(self.precision()), domain)
            .expect("generator")
    }

    pub fn element<I>(
        self: &Arc<Self>,
        terms: I,
        domain: Domain,
        truncation: Option<u32>,
    ) -> Result<TwistedElement<C>>
    where
        I: IntoIterator<Item = (Exponent, LaurentSeries<C>)>,
    {
        let mut out = self.zero(domain);
        out.truncation = truncation;
        for (e, c) in terms {
            if e.len() != self.dim() {
                return Err(Error::Dimension { expected: self.dim(), got: e.len() });
            }
            if domain == Domain::Polydisc && e.iter().any(|&x| x < 0) {
                return Err(Error::Precondition(format!(
                    "negative exponent {e:?} in a polydisc element"
                )));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }
}

/// A finitely supported element `sum a_l m(l)` of a twisted monomial algebra.
#[derive(Clone, Debug)]
pub struct TwistedElement<C> {
    algebra: Arc<TwistedAlgebra<C>>,
    domain: Domain,
    truncation: Option<u32>,
    terms: BTreeMap<Exponent, LaurentSeries<C>>,
}

fn total_degree(e: &[i64]) -> u64 {
    e.iter().map(|x| x.unsigned_abs()).sum()
}

impl<C: Coefficient> TwistedElement<C> {
    pub fn algebra(&self) -> &Arc<TwistedAlgebra<C>> {
        &self.algebra
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &LaurentSeries<C>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i64]) -> LaurentSeries<C> {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| LaurentSeries::zero(self.algebra.precision()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest t-adic precision among the coefficients.
    pub fn min_precision(&self) -> i64 {
        self.terms
            .values()
            .map(|c| c.precision())
            .min()
            .unwrap_or_else(|| self.algebra.precision())
    }

    fn keeps(&self, e: &[i64]) -> bool {
        self.truncation.is_none_or(|d| total_degree(e) <= d as u64)
    }

    fn add_term(&mut self, e: Exponent, c: LaurentSeries<C>) {
        if c.is_zero() || !self.keeps(&e) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                let s = &*slot + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *slot = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn with_truncation(mut self, d: Option<u32>) -> Self {
        self.truncation = d;
        if let Some(d) = d {
            self.terms.retain(|e, _| total_degree(e) <= d as u64);
        }
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Result<Self> {
        if domain == Domain::Polydisc && self.terms.keys().any(|e| e.iter().any(|&x| x < 0)) {
            return Err(Error::Precondition("element has negative exponents".into()));
        }
        self.domain = domain;
        Ok(self)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) && !self.algebra.same_as(&other.algebra) {
            return Err(Error::Incompatible("twist form or q differ".into()));
        }
        Ok(())
    }

    fn joined_domain(&self, other: &Self) -> Domain {
        if self.domain == Domain::Torus || other.domain == Domain::Torus {
            Domain::Torus
        } else {
            Domain::Polydisc
        }
    }

    fn joined_truncation(&self, other: &Self) -> Option<u32> {
        match (self.truncation, other.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.domain = self.joined_domain(other);
        out = out.with_truncation(self.joined_truncation(other));
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Bilinear extension of `m(a) m(b) = q^{B(a,b)} m(a+b)`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.algebra.zero(self.joined_domain(other));
        out.truncation = self.joined_truncation(other);
        let twist = &self.algebra.twist;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !out.keeps(&e) {
                    continue;
                }
                let k = twist.eval(ea, eb);
                let mut c = ca * cb;
                if k != 0 {
                    c = &c * &self.algebra.q_pow(k);
                }
                out.add_term(e, c);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentSeries<C>) -> Self {
        let mut out = self.algebra.zero(self.domain);
        out.truncation = self.truncation;
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    /// Applies `f` to every exponent, keeping coefficients (possibly
    /// rescaled) and moving into `algebra`.
    pub fn map_terms<F>(&self, algebra: &Arc<TwistedAlgebra<C>>, domain: Domain, mut f: F) -> Result<Self>
    where
        F: FnMut(&Exponent, &LaurentSeries<C>) -> Result<(Exponent, LaurentSeries<C>)>,
    {
        let mut pairs = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            pairs.push(f(e, c)?);
        }
        algebra.element(pairs, domain, self.truncation)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = self.algebra.one(self.domain).with_truncation(self.truncation);
        for _ in 0..k {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Inverse of a single-term element `c m(a)`: `c^{-1} q^{B(a,a)} m(-a)`.
    pub fn monomial_inverse(&self) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::Precondition("only monomials are inverted exactly".into()));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let k = self.algebra.twist.eval(e, e);
        let coeff = &c.inv()? * &self.algebra.q_pow(k);
        let neg: Exponent = e.iter().map(|x| -x).collect();
        let domain = if neg.iter().any(|&x| x < 0) { Domain::Torus } else { self.domain };
        let mut out = self.algebra.monomial(neg, coeff, domain)?;
        out.truncation = self.truncation;
        Ok(out)
    }

    /// Gauss norm `max_l (log|a_l| + l . rho)` at log-radii `rho`.
    pub fn gauss_norm(&self, rho: &[Rational]) -> Result<LogNorm> {
        if rho.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: rho.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c.lognorm().shift(&dot(e, rho)))
            .max()
            .unwrap_or(LogNorm::Bottom))
    }

    /// Re-expresses the element in the algebra with twist `target`, through
    /// the isomorphism `m_B(a) -> q^{c(a)} m_{B'}(a)` of
    /// [`TwistForm::rebase_exponent`].
    pub fn rebase(&self, target: &TwistForm) -> Result<Self> {
        let source = &self.algebra.twist;
        if !source.same_commutation(target) {
            return Err(Error::Incompatible("commutation forms differ".into()));
        }
        let algebra = TwistedAlgebra::new(target.clone(), self.algebra.q.clone())?;
        self.map_terms(&algebra, self.domain, |e, c| {
            let k = source.rebase_exponent(target, e);
            Ok((e.clone(), c * &self.algebra.q_pow(k)))
        })
    }

    /// Moves the element into an equal algebra object (same twist and `q`).
    pub fn rehome(&self, algebra: &Arc<TwistedAlgebra<C>>) -> Result<Self> {
        if !self.algebra.same_as(algebra) {
            return Err(Error::Incompatible("twist form or q differ".into()));
        }
        let mut out = self.clone();
        out.algebra = algebra.clone();
        Ok(out)
    }
}

pub(crate) fn dot(e: &[i64], x: &[Rational]) -> Rational {
    e.iter()
        .zip(x)
        .fold(Rational::from_integer(0.into()), |acc, (a, b)| acc + b * Rational::from_integer((*a).into()))
}

impl<C: Coefficient> PartialEq for TwistedElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl<C: Coefficient> Neg for &TwistedElement<C> {
    type Output = TwistedElement<C>;
    fn neg(self) -> TwistedElement<C> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }
}

/// Operator forms panic on incompatible operands; use the `try_` methods
/// when the operands come from outside.
impl<C: Coefficient> Add for &TwistedElement<C> {
    type Output = TwistedElement<C>;
    fn add(self, rhs: Self) -> TwistedElement<C> {
        self.try_add(rhs).expect("incompatible twisted elements")
    }
}

impl<C: Coefficient> Sub for &TwistedElement<C> {
    type Output = TwistedElement<C>;
    fn sub(self, rhs: Self) -> TwistedElement<C> {
        self.try_sub(rhs).expect("incompatible twisted elements")
    }
}

impl<C: Coefficient> Mul for &TwistedElement<C> {
    type Output = TwistedElement<C>;
    fn mul(self, rhs: Self) -> TwistedElement<C> {
        self.try_mul(rhs).expect("incompatible twisted elements")
    }
}

impl<C: Coefficient> fmt::Display for TwistedElement<C> {
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
            let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            write!(f, "[{c}]*m({})", exps.join(","))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
pub(crate) struct TermRepr<C: Coefficient> {
    pub exp: Exponent,
    pub coeff: LaurentSeries<C>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
pub(crate) struct ElementRepr<C: Coefficient> {
    pub twist: TwistForm,
    pub q: LaurentSeries<C>,
    pub domain: Domain,
    pub terms: Vec<TermRepr<C>>,
    pub truncation: Option<u32>,
}

impl<C: Coefficient> Serialize for TwistedElement<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            twist: self.algebra.twist.clone(),
            q: self.algebra.q.clone(),
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { exp: e.clone(), coeff: c.clone() })
                .collect(),
            truncation: self.truncation,
        }
        .serialize(s)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for TwistedElement<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::<C>::deserialize(d)?;
        let algebra = TwistedAlgebra::new(repr.twist, repr.q).map_err(D::Error::custom)?;
        algebra
            .element(
                repr.terms.into_iter().map(|t| (t.exp, t.coeff)),
                repr.domain,
                repr.truncation,
            )
            .map_err(D::Error::custom)
    }
}
