//! Sections of the canonical sheaf over rational polyhedral subsets of
//! `R^n`, and the action of `SL(n,Z) x| (K^x)^n` on sections and points.
//!
//! A transition datum `g = (A, lambda)` acts on sections and on points. Two
//! conventions are available through [`ActionConvention`]; each pairs a
//! section map with the point map that makes
//! `stalk(transform_section(g, f), transform_point(g, x)) = stalk(f, x)`.
//!
//! | convention | section map                                   | point map                    |
//! |------------|-----------------------------------------------|------------------------------|
//! | `Direct`   | `z^I -> prod lambda_i^{I_i} z^{A I}`          | `x -> A^{-T}(x + val lambda)` |
//! | `Inverse`  | `z^I -> prod lambda_j^{-(A^{-T} I)_j} z^{A^{-T} I}` | `x -> A x - val lambda`   |
//!
//! A section map relabels monomials by an integer matrix `M`, so its output
//! lives in the algebra with the pushed-forward twist `B(M^{-1} ., M^{-1} .)`,
//! which makes it an algebra homomorphism. For `n = 2` and `det M = 1` the
//! commutation form is unchanged.
//!
//! Sections are finite truncations of infinite series. Callers who need
//! genuinely infinite sections can generate the terms up to any degree and
//! check each truncation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{int, Rational};
use crate::qalg::{dot, Domain};
use crate::scalars::LogNorm;
use crate::spectra::{monomial_eval, rational_vec};
use crate::{Algebra, Element, Scalar};

/// Convex hull of `vertices` plus the cone spanned by `rays`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr", into = "PolytopeRepr")]
pub struct Polytope {
    vertices: Vec<Vec<Rational>>,
    rays: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    vertices: Vec<RationalPoint>,
    #[serde(default)]
    rays: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RationalPoint(#[serde(with = "rational_vec")] Vec<Rational>);

impl TryFrom<PolytopeRepr> for Polytope {
    type Error = Error;
    fn try_from(r: PolytopeRepr) -> Result<Self> {
        Polytope::new(r.vertices.into_iter().map(|p| p.0).collect(), r.rays)
    }
}

impl From<Polytope> for PolytopeRepr {
    fn from(p: Polytope) -> Self {
        PolytopeRepr { vertices: p.vertices.into_iter().map(RationalPoint).collect(), rays: p.rays }
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<Rational>>, rays: Vec<Vec<i64>>) -> Result<Self> {
        let n = vertices
            .first()
            .ok_or_else(|| Error::Precondition("a polytope needs at least one vertex".into()))?
            .len();
        for v in &vertices {
            check_dim(n, v.len())?;
        }
        for r in &rays {
            check_dim(n, r.len())?;
        }
        Ok(Polytope { vertices, rays })
    }

    /// The cone `apex + cone(rays)`.
    pub fn cone(apex: Vec<Rational>, rays: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(vec![apex], rays)
    }

    /// The box `prod [lo_i, hi_i]`.
    pub fn cube(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let n = lo.len();
        let vertices = (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { hi[i].clone() } else { lo[i].clone() }).collect())
            .collect();
        Self::new(vertices, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.iter().all(|r| r.iter().all(|&x| x == 0))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// `sup_{x in U} (log|c_I| + I.x) < infinity` for every support monomial.
pub fn converges_on(f: &Element, u: &Polytope) -> Result<bool> {
    check_dim(u.dim(), f.dim())?;
    Ok(f.terms().all(|(e, _)| u.rays.iter().all(|r| e.iter().zip(r).map(|(a, b)| a * b).sum::<i64>() <= 0)))
}

/// A truncated series known to converge on its declared domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheafSection {
    element: Element,
    domain: Polytope,
}

impl SheafSection {
    pub fn new(element: Element, domain: Polytope) -> Result<Self> {
        if element.domain() != Domain::Torus {
            return Err(Error::Precondition("sections live on the quantum torus".into()));
        }
        if !converges_on(&element, &domain)? {
            return Err(Error::Precondition("section does not converge on its domain".into()));
        }
        Ok(SheafSection { element, domain })
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    /// The section over the image domain.
    pub fn transform(&self, g: &TransitionData, conv: ActionConvention) -> Result<Self> {
        Ok(SheafSection {
            element: transform_section(g, &self.element, conv)?,
            domain: transform_polytope(g, &self.domain, conv)?,
        })
    }
}

/// Which group element the section formula `z^I -> lambda^I z^{AI}` is
/// read as acting by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionConvention {
    /// `(A, lambda)` acts on sections by the formula itself.
    #[default]
    Direct,
    /// The formula is the action of `(A, lambda)^{-1}`; `(A, lambda)` acts
    /// on points by `x -> Ax - val lambda`.
    Inverse,
}

/// `(A, lambda)` with `A in SL(n, Z)` and `lambda in (K^x)^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransitionRepr", into = "TransitionRepr")]
pub struct TransitionData {
    a: Vec<Vec<i64>>,
    a_inv: Vec<Vec<i64>>,
    lambda: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct TransitionRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<i64>>,
    lambda: Vec<Scalar>,
}

impl TryFrom<TransitionRepr> for TransitionData {
    type Error = Error;
    fn try_from(r: TransitionRepr) -> Result<Self> {
        TransitionData::new(r.a, r.lambda)
    }
}

impl From<TransitionData> for TransitionRepr {
    fn from(g: TransitionData) -> Self {
        TransitionRepr { a: g.a, lambda: g.lambda }
    }
}

impl TransitionData {
    pub fn new(a: Vec<Vec<i64>>, lambda: Vec<Scalar>) -> Result<Self> {
        let n = a.len();
        check_dim(n, lambda.len())?;
        for row in &a {
            check_dim(n, row.len())?;
        }
        let (det, inv) = det_and_inverse(&a);
        if det != int(1) {
            return Err(Error::Precondition(format!("det A = {det}, expected 1")));
        }
        let a_inv = inv
            .iter()
            .map(|row| row.iter().map(|x| crate::field::rational_to_i64(x).expect("unimodular")).collect())
            .collect();
        if let Some(i) = lambda.iter().position(|l| l.is_zero()) {
            return Err(Error::Precondition(format!("lambda_{i} is zero")));
        }
        Ok(TransitionData { a, a_inv, lambda })
    }

    pub fn identity(n: usize, precision: i64) -> Self {
        let a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        TransitionData { a_inv: a.clone(), a, lambda: vec![Scalar::one(precision); n] }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &[Vec<i64>] {
        &self.a_inv
    }

    pub fn lambda(&self) -> &[Scalar] {
        &self.lambda
    }

    /// `(val lambda_1, ..., val lambda_n)`.
    pub fn lambda_valuations(&self) -> Vec<Rational> {
        self.lambda.iter().map(|l| int(l.valuation().expect("nonzero"))).collect()
    }

    /// The datum acting as `g1` after `g2` under `conv`.
    pub fn compose(g1: &Self, g2: &Self, conv: ActionConvention) -> Result<Self> {
        check_dim(g1.dim(), g2.dim())?;
        let a = mat_mul(&g1.a, &g2.a);
        let lambda = match conv {
            // lambda_i = lambda2_i * prod_j lambda1_j^{A2_{ji}}
            ActionConvention::Direct => (0..g1.dim())
                .map(|i| {
                    let col: Vec<i64> = g2.a.iter().map(|row| row[i]).collect();
                    Ok(&g2.lambda[i] * &monomial_in(&g1.lambda, &col)?)
                })
                .collect::<Result<_>>()?,
            // lambda_i = lambda1_i * prod_j lambda2_j^{A1_{ij}}
            ActionConvention::Inverse => (0..g1.dim())
                .map(|i| Ok(&g1.lambda[i] * &monomial_in(&g2.lambda, &g1.a[i])?))
                .collect::<Result<_>>()?,
        };
        TransitionData::new(a, lambda)
    }

    /// The datum `h` with `compose(self, h, conv)` the identity.
    pub fn inverse(&self, conv: ActionConvention) -> Result<Self> {
        let n = self.dim();
        let lambda = match conv {
            // lambda'_i = prod_j lambda_j^{-(A^{-1})_{ji}}
            ActionConvention::Direct => (0..n)
                .map(|i| {
                    let col: Vec<i64> = self.a_inv.iter().map(|row| -row[i]).collect();
                    monomial_in(&self.lambda, &col)
                })
                .collect::<Result<_>>()?,
            // lambda'_j = prod_i lambda_i^{-(A^{-1})_{ji}}
            ActionConvention::Inverse => (0..n)
                .map(|j| {
                    let row: Vec<i64> = self.a_inv[j].iter().map(|x| -x).collect();
                    monomial_in(&self.lambda, &row)
                })
                .collect::<Result<_>>()?,
        };
        TransitionData::new(self.a_inv.clone(), lambda)
    }

    /// Exponent relabelling `M` and the scalar `mu_I` attached to `z^I`.
    fn section_rule(&self, conv: ActionConvention) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        match conv {
            ActionConvention::Direct => (self.a.clone(), self.a_inv.clone()),
            ActionConvention::Inverse => (transpose(&self.a_inv), transpose(&self.a)),
        }
    }
}

fn monomial_in(lambda: &[Scalar], exps: &[i64]) -> Result<Scalar> {
    let p = lambda.iter().map(|l| l.precision()).min().unwrap_or(crate::scalars::default_precision());
    let mut acc = Scalar::one(p);
    for (l, &e) in lambda.iter().zip(exps) {
        if e != 0 {
            acc = &acc * &l.pow(e)?;
        }
    }
    Ok(acc)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn mat_vec_q(a: &[Vec<i64>], v: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(v).fold(int(0), |acc, (x, y)| acc + int(*x) * y)).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Determinant and (when invertible) inverse over `Q` by Gauss-Jordan.
fn det_and_inverse(a: &[Vec<i64>]) -> (Rational, Vec<Vec<Rational>>) {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| int(i64::from(i == j))).collect()).collect();
    let mut det = int(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| m[r][c] != int(0)) else {
            return (int(0), inv);
        };
        if p != c {
            m.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for j in 0..n {
            m[c][j] = &m[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && m[r][c] != int(0) {
                let f = m[r][c].clone();
                for j in 0..n {
                    let (mc, ic) = (m[c][j].clone(), inv[c][j].clone());
                    m[r][j] -= &f * mc;
                    inv[r][j] -= &f * ic;
                }
            }
        }
    }
    (det, inv)
}

/// Applies `g` to a section monomial by monomial. The result lives in the
/// algebra whose twist is pushed forward along the exponent relabelling.
pub fn transform_section(g: &TransitionData, f: &Element, conv: ActionConvention) -> Result<Element> {
    check_dim(g.dim(), f.dim())?;
    if f.domain() != Domain::Torus {
        return Err(Error::Precondition("transition maps act on the quantum torus".into()));
    }
    let (m, m_inv) = g.section_rule(conv);
    let src = f.algebra();
    let twist = src.twist().pushforward(&m_inv);
    let target: Arc<Algebra> =
        if &twist == src.twist() { src.clone() } else { Algebra::new(twist, src.q().clone())? };
    let scalar_for = |e: &[i64]| -> Result<Scalar> {
        match conv {
            ActionConvention::Direct => monomial_in(&g.lambda, e),
            ActionConvention::Inverse => {
                let img: Vec<i64> = mat_vec(&m, e).iter().map(|x| -x).collect();
                monomial_in(&g.lambda, &img)
            }
        }
    };
    let mut terms = Vec::with_capacity(f.len());
    for (e, c) in f.terms() {
        terms.push((mat_vec(&m, e), c * &scalar_for(e)?));
    }
    target.element(terms, Domain::Torus, f.truncation())
}

/// Applies `g` to a point of `Q^n`.
pub fn transform_point(g: &TransitionData, x: &[Rational], conv: ActionConvention) -> Result<Vec<Rational>> {
    check_dim(g.dim(), x.len())?;
    let v = g.lambda_valuations();
    Ok(match conv {
        ActionConvention::Direct => {
            let shifted: Vec<Rational> = x.iter().zip(&v).map(|(a, b)| a + b).collect();
            mat_vec_q(&transpose(&g.a_inv), &shifted)
        }
        ActionConvention::Inverse => {
            mat_vec_q(&g.a, x).into_iter().zip(&v).map(|(a, b)| a - b).collect()
        }
    })
}

/// Image of a polytope under the point map of `g`.
pub fn transform_polytope(g: &TransitionData, u: &Polytope, conv: ActionConvention) -> Result<Polytope> {
    check_dim(g.dim(), u.dim())?;
    let linear = match conv {
        ActionConvention::Direct => transpose(&g.a_inv),
        ActionConvention::Inverse => g.a.clone(),
    };
    let vertices = u.vertices.iter().map(|v| transform_point(g, v, conv)).collect::<Result<_>>()?;
    let rays = u.rays.iter().map(|r| mat_vec(&linear, r)).collect();
    Polytope::new(vertices, rays)
}

/// `max_I (log|c_I| + I.x)`.
pub fn stalk_lognorm(f: &Element, x: &[Rational]) -> Result<LogNorm> {
    monomial_eval(f, x)
}

/// `sup_{x in U} (log|c_I| + I.x)` for a section converging on `U`.
pub fn sup_lognorm(f: &Element, u: &Polytope) -> Result<LogNorm> {
    if !converges_on(f, u)? {
        return Err(Error::Precondition("section does not converge on the polytope".into()));
    }
    Ok(f.terms()
        .map(|(e, c)| {
            let best = u.vertices.iter().map(|v| dot(e, v)).max().expect("nonempty");
            c.lognorm().shift(&best)
        })
        .max()
        .unwrap_or(LogNorm::Bottom))
}
