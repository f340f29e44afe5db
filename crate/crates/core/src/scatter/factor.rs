//! Ordered factorization `g_inf . g_0 = prod_{lambda ascending} g_lambda`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cone, Covector, Slope, WallAutomorphism, E};
use crate::error::{Error, Result};
use crate::qalg::Domain;
use crate::scalars::LogNorm;
use crate::field::Rational;
use crate::spectra::rational_vec;
use crate::{Algebra, Element, Scalar};

/// Ordered factors of `g_inf . g_0`, one per slope with a nontrivial factor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Factorization {
    pub cone: Cone,
    /// Ascending in slope.
    pub factors: Vec<(Slope, WallAutomorphism)>,
}

impl Factorization {
    pub fn slopes(&self) -> Vec<Slope> {
        self.factors.iter().map(|(s, _)| *s).collect()
    }

    pub fn factor(&self, slope: Slope) -> Option<&WallAutomorphism> {
        self.factors.iter().find(|(s, _)| *s == slope).map(|(_, f)| f)
    }

    /// `g_{l_1} . g_{l_2} ... ` for ascending slopes `l_1 < l_2 < ...`.
    pub fn ordered_product(&self, identity: &WallAutomorphism) -> Result<WallAutomorphism> {
        self.factors.iter().try_fold(identity.clone(), |acc, (_, f)| acc.product(f))
    }
}

/// Factorizes `g_inf . g_0` order by order.
///
/// At order `k` the product `P` of the current factors agrees with the
/// target `T` below order `k`, so `h = P^{-1} T` is the identity plus terms
/// of order at least `k`, and its order-`k` corrections are those of `T`
/// minus those of `P`. They commute with everything modulo order `k + 1`, so
/// they are split by slope and each piece is absorbed into the factor of its
/// slope. Each piece is realized exactly: at `q = 1` as
/// `(1 + a m(e), 1 + b m(e))`, otherwise as conjugation by `1 + c m(e)`.
pub fn factorize(g0: &WallAutomorphism, ginf: &WallAutomorphism) -> Result<Factorization> {
    ginf.check_compatible(g0)?;
    for (g, want) in [(g0, Slope::ZERO), (ginf, Slope::INFINITY)] {
        if !g.is_identity() && g.slope() != Some(want) {
            return Err(Error::Precondition(format!(
                "input factor should lie in the slope-{want} subgroup, found {:?}",
                g.slope()
            )));
        }
    }
    let cone = *g0.cone();
    let identity = WallAutomorphism::identity(g0.algebra(), cone)?;
    let target = ginf.product(g0)?;
    let mut pieces: BTreeMap<Slope, Vec<WallAutomorphism>> = BTreeMap::new();
    let p_ = g0.algebra().precision();
    for k in 1..=cone.order() {
        let at = cone.with_order(k)?;
        let mut p = WallAutomorphism::identity(g0.algebra(), at)?;
        for list in pieces.values() {
            for piece in list {
                p = p.product(&piece.with_cone(at)?)?;
            }
        }
        let t = target.with_cone(at)?;
        match p.first_difference(&t)? {
            None => continue,
            Some(low) if low < k as u64 => {
                return Err(Error::Incompatible(format!("discrepancy at order {low} below stage {k}")));
            }
            _ => {}
        }
        let (ta, tb) = t.homogeneous_part(k as u64)?;
        let (pa, pb) = p.homogeneous_part(k as u64)?;
        let (a, b) = (ta.try_sub(&pa)?, tb.try_sub(&pb)?);
        let mut by_slope: BTreeMap<Slope, (Vec<i64>, Scalar, Scalar)> = BTreeMap::new();
        for (x, idx) in [(&a, 0), (&b, 1)] {
            for (e, c) in x.terms() {
                let s = cone.slope(e).ok_or_else(|| {
                    Error::Incompatible(format!("discrepancy m{e:?} is not a cone monomial"))
                })?;
                let slot = by_slope
                    .entry(s)
                    .or_insert_with(|| (e.clone(), Scalar::zero(p_), Scalar::zero(p_)));
                if idx == 0 {
                    slot.1 = c.clone();
                } else {
                    slot.2 = c.clone();
                }
            }
        }
        for (s, (e, ca, cb)) in by_slope {
            pieces.entry(s).or_default().push(homogeneous_element(&cone, g0, &e, &ca, &cb)?);
        }
    }
    let mut factors = Vec::new();
    for (s, list) in pieces {
        let f = list.iter().try_fold(identity.clone(), |acc, piece| acc.product(piece))?;
        if !f.is_identity() {
            factors.push((s, f));
        }
    }
    let out = Factorization { cone, factors };
    if let Some(low) = out.ordered_product(&identity)?.first_difference(&target)? {
        return Err(Error::Incompatible(format!("factorization residual at order {low}")));
    }
    Ok(out)
}

/// The two-wall input `g_0 = wall(dx, 1 + xi^{-1})`,
/// `g_inf = wall(dy, 1 + eta^{-1})` in the standard cone.
pub fn standard_input(algebra: &Arc<Algebra>, order: u32) -> Result<(WallAutomorphism, WallAutomorphism)> {
    let p = algebra.precision();
    let cone = Cone::standard(order);
    let bump = |e: Vec<i64>| {
        algebra.element([(vec![0, 0], Scalar::one(p)), (e, Scalar::one(p))], Domain::Torus, None)
    };
    let g0 = WallAutomorphism::wall(algebra, cone, [1, 0], &bump(vec![-1, 0])?)?;
    let ginf = WallAutomorphism::wall(algebra, cone, [0, 1], &bump(vec![0, -1])?)?;
    Ok((g0, ginf))
}

/// Group element whose corrections are `(a m(e), b m(e))` at order
/// `ord(e)` and which lies in the slope subgroup of `e`.
fn homogeneous_element(
    cone: &Cone,
    like: &WallAutomorphism,
    e: &[i64],
    a: &Scalar,
    b: &Scalar,
) -> Result<WallAutomorphism> {
    let alg = like.algebra();
    let p = alg.precision();
    let one = Scalar::one(p);
    let mono = |c: &Scalar| -> Result<Element> {
        alg.element([(vec![0, 0], one.clone()), (e.to_vec(), c.clone())], Domain::Torus, None)
    };
    if alg.q().is_one() {
        return WallAutomorphism::from_factors(alg, *cone, mono(a)?, mono(b)?);
    }
    let s1 = alg.twist().commutation(e, &E[0]);
    let s2 = alg.twist().commutation(e, &E[1]);
    let d1 = &alg.q_pow(s1) - &one;
    let d2 = &alg.q_pow(s2) - &one;
    if a * &d2 != b * &d1 {
        return Err(Error::Incompatible(format!(
            "order-{} discrepancy at m{e:?} is not in the Lie algebra: ({a}, {b})",
            cone.ord(e).unwrap_or(0)
        )));
    }
    let c = if s1 != 0 { a.div(&d1)? } else { b.div(&d2)? };
    let aut = WallAutomorphism::conjugation(alg, *cone, &mono(&c)?)?;
    let (ua, ub) = aut.factors();
    if &ua.coeff(e) != a || &ub.coeff(e) != b {
        return Err(Error::Incompatible("conjugation does not reproduce the discrepancy".into()));
    }
    Ok(aut)
}

/// Closed angle at `base` spanned by `alpha_1`, `alpha_2`, with the bound
/// `log|c| - <n1 alpha_1 + n2 alpha_2, base> <= 0` on every correction
/// coefficient `c` at `m(-(n1 alpha_1 + n2 alpha_2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleRegion {
    #[serde(with = "rational_vec")]
    pub base: Vec<Rational>,
    pub alpha1: Covector,
    pub alpha2: Covector,
}

impl AngleRegion {
    pub fn new(base: Vec<Rational>, alpha1: Covector, alpha2: Covector) -> Result<Self> {
        if base.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: base.len() });
        }
        Cone::new(alpha1, alpha2, 1)?;
        Ok(AngleRegion { base, alpha1, alpha2 })
    }

    /// Largest `log|c| + e.base` over the corrections (`Bottom` for the
    /// identity); the bound holds iff this is at most 0.
    pub fn excess(&self, aut: &WallAutomorphism) -> Result<LogNorm> {
        let (u, v) = aut.factors();
        let one = aut.algebra().one(Domain::Torus);
        let a = u.try_sub(&one)?.gauss_norm(&self.base)?;
        let b = v.try_sub(&one)?.gauss_norm(&self.base)?;
        Ok(a.max(b))
    }

    pub fn admits(&self, aut: &WallAutomorphism) -> Result<bool> {
        Ok(self.excess(aut)? <= LogNorm::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;
    use crate::qalg::TwistForm;

    #[test]
    fn classical_pentagon_has_three_slopes() {
        let alg = Algebra::new(TwistForm::ordered(2), Scalar::one(16)).unwrap();
        let (g0, ginf) = standard_input(&alg, 6).unwrap();
        let f = factorize(&g0, &ginf).unwrap();
        let text: Vec<String> = f.slopes().iter().map(|s| s.to_string()).collect();
        assert_eq!(text, ["0", "1", "inf"]);
        let mid = f.factor(Slope::new(1, 1).unwrap()).unwrap();
        assert_eq!(mid.slope(), Some(Slope::new(1, 1).unwrap()));
    }

    #[test]
    fn identity_inputs() {
        let alg = Algebra::new(TwistForm::ordered(2), Scalar::from_terms([(0, int(1)), (1, int(1))], 16)).unwrap();
        let (g0, ginf) = standard_input(&alg, 4).unwrap();
        let id = WallAutomorphism::identity(&alg, Cone::standard(4)).unwrap();
        let f = factorize(&id, &ginf).unwrap();
        assert_eq!(f.slopes(), vec![Slope::INFINITY]);
        assert_eq!(f.factors[0].1, ginf);
        let f = factorize(&g0, &id).unwrap();
        assert_eq!(f.slopes(), vec![Slope::ZERO]);
        assert_eq!(f.factors[0].1, g0);
    }
}
