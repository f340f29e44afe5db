//! Wall-crossing automorphisms of the rank-two quantum torus.
//!
//! Write `xi = m(1,0)` and `eta = m(0,1)`. An automorphism `phi` is stored
//! through its correction factors `u_xi`, `u_eta`, so that
//! `phi(xi) = xi u_xi` and `phi(eta) = eta u_eta`. Corrections are power
//! series in the expansion monomials `m(-alpha_1)`, `m(-alpha_2)` of a
//! [`Cone`], graded by total order `n1 + n2` for
//! `m(-(n1 alpha_1 + n2 alpha_2))` and truncated above the cone's order `D`.
//!
//! [`WallAutomorphism::compose`] is substitution: `compose(phi, psi)` has
//! images `phi(xi)`, `phi(eta)` with `psi(xi)`, `psi(eta)` substituted in,
//! so as maps of the algebra it is `psi o phi`. The group product used by
//! [`factorize`] is [`WallAutomorphism::product`], `a . b = compose(a, b)`:
//! a product is read left to right as a sequence of substitutions. With this
//! law the classical pentagon `g_inf . g_0 = g_0 . g_1 . g_inf` holds for
//! `g_0 = wall(dx, 1 + xi^{-1})` and `g_inf = wall(dy, 1 + eta^{-1})`.

mod chart;
mod factor;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::int;
use crate::qalg::Domain;
use crate::{Algebra, Element, Scalar};

pub use chart::{scatter_chart, Collision, Generation, Line, ScatteringDiagram};
pub use factor::{factorize, standard_input, AngleRegion, Factorization};

/// Integer covector `(a, b)`, standing for `a dx + b dy`.
pub type Covector = [i64; 2];

/// `a ^ b = a_1 b_2 - a_2 b_1`.
pub fn wedge(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `v / gcd(v)`.
pub fn primitive(v: Covector) -> Covector {
    let g = v[0].gcd(&v[1]);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

/// Expansion cone `alpha_1 ^ alpha_2 > 0` together with the truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct Cone {
    alpha1: Covector,
    alpha2: Covector,
    order: u32,
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    alpha1: Covector,
    alpha2: Covector,
    order: u32,
}

impl TryFrom<ConeRepr> for Cone {
    type Error = Error;
    fn try_from(r: ConeRepr) -> Result<Self> {
        Cone::new(r.alpha1, r.alpha2, r.order)
    }
}

impl From<Cone> for ConeRepr {
    fn from(c: Cone) -> Self {
        ConeRepr { alpha1: c.alpha1, alpha2: c.alpha2, order: c.order }
    }
}

impl Cone {
    pub fn new(alpha1: Covector, alpha2: Covector, order: u32) -> Result<Self> {
        if wedge(&alpha1, &alpha2) <= 0 {
            return Err(Error::Precondition(format!(
                "cone covectors {alpha1:?}, {alpha2:?} need alpha1 ^ alpha2 > 0"
            )));
        }
        if order == 0 {
            return Err(Error::Precondition("truncation order must be positive".into()));
        }
        Ok(Cone { alpha1, alpha2, order })
    }

    /// `alpha_1 = dx`, `alpha_2 = dy`: corrections are series in `xi^{-1}`
    /// and `eta^{-1}`.
    pub fn standard(order: u32) -> Self {
        Cone { alpha1: [1, 0], alpha2: [0, 1], order }
    }

    pub fn alpha1(&self) -> Covector {
        self.alpha1
    }

    pub fn alpha2(&self) -> Covector {
        self.alpha2
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn with_order(&self, order: u32) -> Result<Self> {
        Cone::new(self.alpha1, self.alpha2, order)
    }

    /// `(n1, n2)` with `e = -(n1 alpha_1 + n2 alpha_2)`, when both are
    /// non-negative integers.
    pub fn coords(&self, e: &[i64]) -> Option<(u64, u64)> {
        let det = wedge(&self.alpha1, &self.alpha2);
        let a = -wedge(e, &self.alpha2);
        let b = wedge(e, &self.alpha1);
        if a % det != 0 || b % det != 0 || a < 0 || b < 0 {
            return None;
        }
        Some(((a / det) as u64, (b / det) as u64))
    }

    /// Total order `n1 + n2` of a cone monomial.
    pub fn ord(&self, e: &[i64]) -> Option<u64> {
        self.coords(e).map(|(a, b)| a + b)
    }

    fn ord_or_err(&self, e: &[i64]) -> Result<u64> {
        self.ord(e).ok_or_else(|| {
            Error::Precondition(format!("monomial m{e:?} is not a cone monomial for {self:?}"))
        })
    }

    /// `m(-(n1 alpha_1 + n2 alpha_2))`.
    pub fn exponent(&self, n1: i64, n2: i64) -> Vec<i64> {
        vec![-(n1 * self.alpha1[0] + n2 * self.alpha2[0]), -(n1 * self.alpha1[1] + n2 * self.alpha2[1])]
    }

    pub fn slope(&self, e: &[i64]) -> Option<Slope> {
        self.coords(e).and_then(|(a, b)| Slope::new(a, b))
    }
}

/// Ray `n2 / n1` in `[0, +inf]`, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    n1: u64,
    n2: u64,
}

impl Slope {
    pub fn new(n1: u64, n2: u64) -> Option<Self> {
        let g = n1.gcd(&n2);
        (g != 0).then(|| Slope { n1: n1 / g, n2: n2 / g })
    }

    pub const ZERO: Slope = Slope { n1: 1, n2: 0 };
    pub const INFINITY: Slope = Slope { n1: 0, n2: 1 };

    /// Primitive `(n1, n2)` on the ray.
    pub fn direction(&self) -> (u64, u64) {
        (self.n1, self.n2)
    }

    pub fn is_extremal(&self) -> bool {
        self.n1 == 0 || self.n2 == 0
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n2 as u128 * other.n1 as u128).cmp(&(other.n2 as u128 * self.n1 as u128))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.n1, self.n2) {
            (0, _) => write!(f, "inf"),
            (1, n) => write!(f, "{n}"),
            (d, n) => write!(f, "{n}/{d}"),
        }
    }
}

impl std::str::FromStr for Slope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad slope {s:?}"));
        if s == "inf" {
            return Ok(Slope::INFINITY);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?),
            None => (s.parse().map_err(|_| bad())?, 1),
        };
        Slope::new(d, n).ok_or_else(bad)
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Automorphism `xi -> xi u_xi`, `eta -> eta u_eta` with unipotent cone
/// series corrections.
#[derive(Clone, Debug)]
pub struct WallAutomorphism {
    algebra: Arc<Algebra>,
    cone: Cone,
    u: [Element; 2],
    slope: Option<Slope>,
}

const E: [[i64; 2]; 2] = [[1, 0], [0, 1]];

impl WallAutomorphism {
    pub fn identity(algebra: &Arc<Algebra>, cone: Cone) -> Result<Self> {
        check_rank(algebra)?;
        let one = algebra.one(Domain::Torus);
        Ok(WallAutomorphism { algebra: algebra.clone(), cone, u: [one.clone(), one], slope: None })
    }

    /// From correction factors; checks unipotence and the q-commutation
    /// relation modulo the cone order.
    pub fn from_factors(algebra: &Arc<Algebra>, cone: Cone, u_xi: Element, u_eta: Element) -> Result<Self> {
        let aut = Self::unchecked(algebra, cone, u_xi, u_eta)?;
        let r = aut.commutation_residual()?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("images do not q-commute: residual {r}")));
        }
        Ok(aut)
    }

    /// From the images of `xi` and `eta`.
    pub fn from_images(algebra: &Arc<Algebra>, cone: Cone, xi: &Element, eta: &Element) -> Result<Self> {
        check_rank(algebra)?;
        let xi = xi.rehome(algebra)?.with_domain(Domain::Torus)?;
        let eta = eta.rehome(algebra)?.with_domain(Domain::Torus)?;
        let u_xi = algebra.generator(0, Domain::Torus).monomial_inverse()?.try_mul(&xi)?;
        let u_eta = algebra.generator(1, Domain::Torus).monomial_inverse()?.try_mul(&eta)?;
        Self::from_factors(algebra, cone, u_xi, u_eta)
    }

    fn unchecked(algebra: &Arc<Algebra>, cone: Cone, u_xi: Element, u_eta: Element) -> Result<Self> {
        check_rank(algebra)?;
        let mut u = [
            u_xi.rehome(algebra)?.with_domain(Domain::Torus)?.with_truncation(None),
            u_eta.rehome(algebra)?.with_domain(Domain::Torus)?.with_truncation(None),
        ];
        for x in &mut u {
            *x = truncate(&cone, x)?;
            let c0 = x.coeff(&[0, 0]);
            if !c0.is_one() {
                return Err(Error::Precondition(format!("correction has constant term {c0}, expected 1")));
            }
        }
        let mut aut = WallAutomorphism { algebra: algebra.clone(), cone, u, slope: None };
        aut.slope = aut.common_slope();
        Ok(aut)
    }

    /// Wall along `alpha` with function `f` of `x = m(-alpha)`:
    /// `m(e) -> m(e) prod_{k=0}^{eps-1} f(q^{kc} x)` for `eps = e ^ alpha > 0`
    /// and the inverse product for `eps < 0`, where `c = B~(e_1, e_2)`.
    ///
    /// `f` must be supported on `m(-j alpha)`, `j >= 0`; a missing constant
    /// term is read as 1. `wall_aut(dy, 1 + eta^{-1})` is `(xi(1+eta^{-1}), eta)`.
    pub fn wall(algebra: &Arc<Algebra>, cone: Cone, alpha: Covector, f: &Element) -> Result<Self> {
        check_rank(algebra)?;
        if alpha == [0, 0] {
            return Err(Error::Precondition("zero covector".into()));
        }
        let mut terms: Vec<(i64, Scalar)> = Vec::new();
        let mut has_constant = false;
        for (e, c) in f.terms() {
            let j = ray_multiple(e, alpha).ok_or_else(|| {
                Error::Precondition(format!("correction m{e:?} is not on the ray of m(-{alpha:?})"))
            })?;
            has_constant |= j == 0;
            terms.push((j, c.clone()));
        }
        let p = algebra.precision();
        if !has_constant {
            terms.push((0, Scalar::one(p)));
        }
        let c = algebra.twist().commutation(&E[0], &E[1]);
        let ray = |j: i64| vec![-j * alpha[0], -j * alpha[1]];
        // f(q^s x) as an element
        let shifted = |s: i64| -> Result<Element> {
            let pairs: Vec<(Vec<i64>, Scalar)> =
                terms.iter().map(|(j, a)| (ray(*j), a * &algebra.q_pow(s * j))).collect();
            truncate(&cone, &algebra.element(pairs, Domain::Torus, None)?)
        };
        let mut u = Vec::with_capacity(2);
        for e in E {
            let eps = wedge(&e, &alpha);
            let mut acc = algebra.one(Domain::Torus);
            if eps > 0 {
                for k in 0..eps {
                    acc = mul_trunc(&cone, &acc, &shifted(k * c)?)?;
                }
            } else {
                for k in 1..=-eps {
                    acc = mul_trunc(&cone, &acc, &series_inverse(&cone, &shifted(-k * c)?)?)?;
                }
            }
            u.push(acc);
        }
        let [ux, ue]: [Element; 2] = u.try_into().expect("two");
        Self::from_factors(algebra, cone, ux, ue)
    }

    /// `x -> Phi x Phi^{-1}` for a unipotent cone series `Phi` (needs
    /// `q != 1`).
    pub fn conjugation(algebra: &Arc<Algebra>, cone: Cone, phi: &Element) -> Result<Self> {
        check_rank(algebra)?;
        let phi = truncate(&cone, &phi.rehome(algebra)?)?;
        let inv = series_inverse(&cone, &phi)?;
        let u0 = mul_trunc(&cone, &tau(&phi, &E[0]), &inv)?;
        let u1 = mul_trunc(&cone, &tau(&phi, &E[1]), &inv)?;
        Self::from_factors(algebra, cone, u0, u1)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn order(&self) -> u32 {
        self.cone.order
    }

    /// `(u_xi, u_eta)`.
    pub fn factors(&self) -> (&Element, &Element) {
        (&self.u[0], &self.u[1])
    }

    /// `(phi(xi), phi(eta))`.
    pub fn images(&self) -> Result<(Element, Element)> {
        Ok((
            self.algebra.generator(0, Domain::Torus).try_mul(&self.u[0])?,
            self.algebra.generator(1, Domain::Torus).try_mul(&self.u[1])?,
        ))
    }

    /// Ray carrying every correction, if there is a single one.
    pub fn slope(&self) -> Option<Slope> {
        self.slope
    }

    fn common_slope(&self) -> Option<Slope> {
        let mut slope = None;
        for x in &self.u {
            for (e, _) in x.terms() {
                if e.iter().all(|&v| v == 0) {
                    continue;
                }
                let s = self.cone.slope(e)?;
                match slope {
                    None => slope = Some(s),
                    Some(prev) if prev != s => return None,
                    _ => {}
                }
            }
        }
        slope
    }

    /// Correction terms `(exponent, coefficient)` of both factors, constant
    /// terms excluded.
    pub fn corrections(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.u.iter().flat_map(|x| x.terms().filter(|(e, _)| e.iter().any(|&v| v != 0)))
    }

    pub fn is_identity(&self) -> bool {
        self.corrections().next().is_none()
    }

    /// `tau_{e_2}(u_xi) u_eta - tau_{e_1}(u_eta) u_xi`, which vanishes
    /// exactly when the images q-commute like `xi`, `eta`.
    pub fn commutation_residual(&self) -> Result<Element> {
        let lhs = mul_trunc(&self.cone, &tau(&self.u[0], &E[1]), &self.u[1])?;
        let rhs = mul_trunc(&self.cone, &tau(&self.u[1], &E[0]), &self.u[0])?;
        lhs.try_sub(&rhs)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.algebra.same_as(&other.algebra) {
            return Err(Error::Incompatible("automorphisms over different algebras".into()));
        }
        if self.cone != other.cone {
            return Err(Error::Incompatible(format!(
                "cones or truncation orders differ: {:?} vs {:?}",
                self.cone, other.cone
            )));
        }
        Ok(())
    }

    /// Substitution of `psi`'s images into `self`'s images; as maps this
    /// is `psi o self`.
    pub fn compose(&self, psi: &Self) -> Result<Self> {
        self.check_compatible(psi)?;
        let mut sub = Substitution::new(psi)?;
        let mut u = Vec::with_capacity(2);
        for i in 0..2 {
            let moved = sub.apply(&self.u[i])?;
            u.push(mul_trunc(&self.cone, &psi.u[i], &moved)?);
        }
        let [a, b]: [Element; 2] = u.try_into().expect("two");
        Self::unchecked(&self.algebra, self.cone, a, b)
    }

    /// Group product `self . other = compose(self, other)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }

    /// Image of an arbitrary torus element.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        let x = x.rehome(&self.algebra)?;
        Substitution::new(self)?.apply_general(&x)
    }

    /// Inverse modulo the truncation order.
    pub fn invert(&self) -> Result<Self> {
        let mut psi = Self::identity(&self.algebra, self.cone)?;
        for _ in 0..=self.cone.order + 1 {
            let r = self.compose(&psi)?;
            if r.is_identity() {
                return Ok(psi);
            }
            let naive = Self::unchecked(
                &self.algebra,
                self.cone,
                two_minus(&self.algebra, &r.u[0])?,
                two_minus(&self.algebra, &r.u[1])?,
            )?;
            psi = psi.compose(&naive)?;
        }
        Err(Error::Precondition("inversion did not converge; input is not unipotent".into()))
    }

    /// Conjugation by the grading scaling `m(e) -> C^{-ord(e)} m(e)`: the
    /// correction coefficient at a monomial of order `k` gains `C^k`.
    pub fn transport(&self, c: &Scalar) -> Result<Self> {
        if c.lognorm() >= crate::scalars::LogNorm::zero() {
            return Err(Error::Precondition(format!("transport needs |C| < 1, got C = {c}")));
        }
        let mut u = Vec::with_capacity(2);
        for x in &self.u {
            let pairs = x
                .terms()
                .map(|(e, a)| {
                    let k = self.cone.ord_or_err(e)? as i64;
                    Ok((e.clone(), a * &c.pow(k)?))
                })
                .collect::<Result<Vec<_>>>()?;
            u.push(self.algebra.element(pairs, Domain::Torus, None)?);
        }
        let [a, b]: [Element; 2] = u.try_into().expect("two");
        Self::unchecked(&self.algebra, self.cone, a, b)
    }

    /// Re-expresses the corrections in another cone (every correction must
    /// be a cone monomial there) and truncates at its order.
    pub fn with_cone(&self, cone: Cone) -> Result<Self> {
        Self::unchecked(&self.algebra, cone, self.u[0].clone(), self.u[1].clone())
    }

    /// Keeps corrections of order at most `k`.
    pub fn truncated(&self, k: u32) -> Result<Self> {
        self.with_cone(self.cone.with_order(k)?)
    }

    /// Corrections of order exactly `k`, as `(u_xi - 1, u_eta - 1)` parts.
    pub fn homogeneous_part(&self, k: u64) -> Result<(Element, Element)> {
        let pick = |x: &Element| -> Result<Element> {
            let pairs = x
                .terms()
                .filter(|(e, _)| self.cone.ord(e) == Some(k))
                .map(|(e, c)| (e.clone(), c.clone()));
            self.algebra.element(pairs, Domain::Torus, None)
        };
        Ok((pick(&self.u[0])?, pick(&self.u[1])?))
    }

    /// Lowest order at which `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &Self) -> Result<Option<u64>> {
        self.check_compatible(other)?;
        let mut low: Option<u64> = None;
        for i in 0..2 {
            let d = self.u[i].try_sub(&other.u[i])?;
            for (e, _) in d.terms() {
                let k = self.cone.ord_or_err(e)?;
                low = Some(low.map_or(k, |l| l.min(k)));
            }
        }
        Ok(low)
    }

    /// `(phi(xi) - psi(xi), phi(eta) - psi(eta))` divided by the generators,
    /// i.e. the differences of the correction factors.
    pub fn difference(&self, other: &Self) -> Result<(Element, Element)> {
        self.check_compatible(other)?;
        Ok((self.u[0].try_sub(&other.u[0])?, self.u[1].try_sub(&other.u[1])?))
    }
}

impl PartialEq for WallAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).map(|d| d.is_none()).unwrap_or(false)
    }
}

fn check_rank(algebra: &Algebra) -> Result<()> {
    if algebra.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: algebra.dim() });
    }
    Ok(())
}

/// `j` with `e = -j alpha`, `j >= 0`.
fn ray_multiple(e: &[i64], alpha: Covector) -> Option<i64> {
    if wedge(e, &alpha) != 0 {
        return None;
    }
    let (num, den) = if alpha[0] != 0 { (-e[0], alpha[0]) } else { (-e[1], alpha[1]) };
    (num % den == 0 && num / den >= 0).then(|| num / den)
}

/// Drops terms above the cone order; errors on non-cone monomials.
fn truncate(cone: &Cone, x: &Element) -> Result<Element> {
    let mut keep = Vec::with_capacity(x.len());
    for (e, c) in x.terms() {
        if cone.ord_or_err(e)? <= cone.order as u64 {
            keep.push((e.clone(), c.clone()));
        }
    }
    x.algebra().element(keep, Domain::Torus, None)
}

/// Product of cone series, skipping pairs above the cone order.
fn mul_trunc(cone: &Cone, a: &Element, b: &Element) -> Result<Element> {
    let alg = a.algebra();
    let d = cone.order as u64;
    let tb: Vec<(&Vec<i64>, &Scalar, u64)> =
        b.terms().map(|(e, c)| Ok((e, c, cone.ord_or_err(e)?))).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (ea, ca) in a.terms() {
        let oa = cone.ord_or_err(ea)?;
        for (eb, cb, ob) in &tb {
            if oa + ob > d {
                continue;
            }
            let e = vec![ea[0] + eb[0], ea[1] + eb[1]];
            let k = alg.twist().eval(ea, eb);
            let mut c = ca * *cb;
            if k != 0 {
                c = &c * &alg.q_pow(k);
            }
            out.push((e, c));
        }
    }
    alg.element(out, Domain::Torus, None)
}

/// `tau_f(sum c_g m(g)) = sum c_g q^{B~(g,f)} m(g) = m(f)^{-1} (.) m(f)`.
fn tau(x: &Element, f: &[i64]) -> Element {
    let alg = x.algebra();
    let pairs = x.terms().map(|(g, c)| {
        let k = alg.twist().commutation(g, f);
        (g.clone(), if k == 0 { c.clone() } else { c * &alg.q_pow(k) })
    });
    alg.element(pairs, Domain::Torus, None).expect("same shape")
}

/// `sum_k (1 - u)^k` up to the cone order, for `u` with constant term 1.
fn series_inverse(cone: &Cone, u: &Element) -> Result<Element> {
    let alg = u.algebra();
    let one = alg.one(Domain::Torus);
    let v = one.try_sub(u)?;
    let mut acc = one.clone();
    let mut power = one;
    for _ in 0..cone.order {
        power = mul_trunc(cone, &power, &v)?;
        if power.is_zero() {
            break;
        }
        acc = acc.try_add(&power)?;
    }
    Ok(acc)
}

fn two_minus(alg: &Arc<Algebra>, u: &Element) -> Result<Element> {
    let two = alg.one(Domain::Torus).scale(&Scalar::constant(int(2), alg.precision()));
    two.try_sub(u)
}

/// Cached `w_g = m(g)^{-1} psi(m(g))`, built from
/// `w_{e+f} = tau_f(w_e) w_f`.
struct Substitution<'a> {
    psi: &'a WallAutomorphism,
    cache: HashMap<Vec<i64>, Element>,
}

impl<'a> Substitution<'a> {
    fn new(psi: &'a WallAutomorphism) -> Result<Self> {
        let cone = &psi.cone;
        let mut cache = HashMap::new();
        cache.insert(vec![0, 0], psi.algebra.one(Domain::Torus));
        for i in 0..2 {
            cache.insert(E[i].to_vec(), psi.u[i].clone());
            let neg = [-E[i][0], -E[i][1]];
            cache.insert(neg.to_vec(), tau(&series_inverse(cone, &psi.u[i])?, &neg));
        }
        Ok(Substitution { psi, cache })
    }

    fn w(&mut self, g: &[i64]) -> Result<Element> {
        if let Some(w) = self.cache.get(g) {
            return Ok(w.clone());
        }
        let mut cur = vec![0i64, 0];
        let mut w = self.cache[&cur].clone();
        for i in 0..2 {
            let step = g[i].signum();
            let f: Vec<i64> = (0..2).map(|j| if j == i { step } else { 0 }).collect();
            for _ in 0..g[i].abs() {
                cur[i] += step;
                w = match self.cache.get(&cur) {
                    Some(x) => x.clone(),
                    None => {
                        let wf = self.cache[&f].clone();
                        let next = mul_trunc(&self.psi.cone, &tau(&w, &f), &wf)?;
                        self.cache.insert(cur.clone(), next.clone());
                        next
                    }
                };
            }
        }
        Ok(w)
    }

    /// `psi(u)` for a cone series `u`.
    fn apply(&mut self, u: &Element) -> Result<Element> {
        let cone = self.psi.cone;
        let alg = self.psi.algebra.clone();
        let mut acc = alg.zero(Domain::Torus);
        for (g, c) in u.terms() {
            let w = self.w(g)?;
            let m = alg.monomial(g.clone(), c.clone(), Domain::Torus)?;
            acc = acc.try_add(&mul_trunc(&cone, &m, &w)?)?;
        }
        Ok(acc)
    }

    /// `psi(x)` for any torus element, each `w_g` truncated at the cone order.
    fn apply_general(&mut self, x: &Element) -> Result<Element> {
        let alg = self.psi.algebra.clone();
        let mut acc = alg.zero(Domain::Torus);
        for (g, c) in x.terms() {
            let w = self.w(g)?;
            let m = alg.monomial(g.clone(), c.clone(), Domain::Torus)?;
            acc = acc.try_add(&m.try_mul(&w)?)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct WallRepr {
    cone: Cone,
    images: [Element; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slope: Option<Slope>,
}

impl Serialize for WallAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (xi, eta) = self.images().map_err(serde::ser::Error::custom)?;
        WallRepr { cone: self.cone, images: [xi, eta], slope: self.slope }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WallAutomorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = WallRepr::deserialize(d)?;
        let [xi, eta] = r.images;
        let alg = xi.algebra().clone();
        let aut = WallAutomorphism::from_images(&alg, r.cone, &xi, &eta).map_err(serde::de::Error::custom)?;
        if let Some(s) = r.slope {
            if aut.slope.is_some_and(|t| t != s) {
                return Err(serde::de::Error::custom(format!("slope tag {s} does not match the corrections")));
            }
        }
        Ok(aut)
    }
}
