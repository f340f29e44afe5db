//! The quantum K3 singular local model: the algebra with generators
//! `alpha, beta, gamma`, its three charts into quantum tori, the gluing
//! automorphisms between charts, and the piecewise-linear maps `f`, `j`, `pi`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{int, rat, Rational};
use crate::qalg::{Domain, TwistForm};
use crate::scalars::LogNorm;
use crate::scatter::{Cone, WallAutomorphism};
use crate::spectra::{monomial_eval, rational_vec, SpectrumPoint};
use crate::{Algebra, Element, Free, Scalar};

/// The constant `0 < eps < 1` in the chart inequalities.
pub fn epsilon() -> Rational {
    rat(1, 2)
}

/// Orientation of a q-commutation relation between an ordered pair `(a, b)`:
/// `Forward` is `a b = q b a`, `Backward` is `b a = q a b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Forward,
    Backward,
}

/// The three orientation choices: `(xi, eta)`, `(alpha, gamma)`, `(beta, gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conventions {
    pub xi_eta: Orientation,
    pub alpha_gamma: Orientation,
    pub beta_gamma: Orientation,
}

impl Conventions {
    /// The unique set under which all three charts are homomorphisms for
    /// generic `q`: `xi eta = q eta xi`, `alpha gamma = q gamma alpha`,
    /// `gamma beta = q beta gamma`. [`select_conventions`] recomputes it.
    pub const SELECTED: Conventions = Conventions {
        xi_eta: Orientation::Forward,
        alpha_gamma: Orientation::Forward,
        beta_gamma: Orientation::Backward,
    };

    pub fn all() -> Vec<Conventions> {
        use Orientation::*;
        let mut out = Vec::with_capacity(8);
        for xi_eta in [Forward, Backward] {
            for alpha_gamma in [Forward, Backward] {
                for beta_gamma in [Forward, Backward] {
                    out.push(Conventions { xi_eta, alpha_gamma, beta_gamma });
                }
            }
        }
        out
    }

    /// Twist form of the chart tori: `m(a) m(b) = q^{B(a,b)} m(a+b)` with
    /// the requested orientation of `xi`, `eta`.
    pub fn twist(&self) -> TwistForm {
        match self.xi_eta {
            Orientation::Forward => TwistForm::ordered(2),
            Orientation::Backward => TwistForm::new(vec![vec![0, -1], vec![0, 0]]).expect("2x2"),
        }
    }
}

impl fmt::Display for Conventions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = |o: Orientation, a: &str, b: &str| match o {
            Orientation::Forward => format!("{a} {b} = q {b} {a}"),
            Orientation::Backward => format!("{b} {a} = q {a} {b}"),
        };
        write!(
            f,
            "{}, {}, {}",
            rel(self.xi_eta, "xi", "eta"),
            rel(self.alpha_gamma, "alpha", "gamma"),
            rel(self.beta_gamma, "beta", "gamma")
        )
    }
}

const ALPHA: u32 = 0;
const BETA: u32 = 1;
const GAMMA: u32 = 2;

pub const RELATION_NAMES: [&str; 4] = ["alpha-gamma", "beta-gamma", "beta alpha - q alpha beta = 1 - q", "(alpha beta - 1) gamma = 1"];

/// `A_q(S)`: generators `alpha, beta, gamma` (letters 0, 1, 2) subject to
/// four relations, each stored as a free-algebra element that must vanish.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KThreePresentation {
    pub q: Scalar,
    pub conventions: Conventions,
    pub relations: Vec<Free>,
}

impl KThreePresentation {
    pub fn new(q: Scalar, conventions: Conventions) -> Result<Self> {
        let p = q.precision();
        let one = Scalar::one(p);
        let word = |w: Vec<u32>, c: Scalar| (w, c);
        let commutation = |o: Orientation, a: u32, b: u32| {
            let (x, y) = match o {
                Orientation::Forward => (a, b),
                Orientation::Backward => (b, a),
            };
            Free::from_terms(3, [word(vec![x, y], one.clone()), word(vec![y, x], -&q)])
        };
        let relations = vec![
            commutation(conventions.alpha_gamma, ALPHA, GAMMA)?,
            commutation(conventions.beta_gamma, BETA, GAMMA)?,
            Free::from_terms(
                3,
                [
                    word(vec![BETA, ALPHA], one.clone()),
                    word(vec![ALPHA, BETA], -&q),
                    word(vec![], &q - &one),
                ],
            )?,
            Free::from_terms(
                3,
                [
                    word(vec![ALPHA, BETA, GAMMA], one.clone()),
                    word(vec![GAMMA], -&one),
                    word(vec![], -&one),
                ],
            )?,
        ];
        Ok(KThreePresentation { q, conventions, relations })
    }

    /// The standard presentation at `q = 1 + t`.
    pub fn standard(precision: i64) -> Result<Self> {
        Self::new(Scalar::from_terms([(0, int(1)), (1, int(1))], precision), Conventions::SELECTED)
    }

    /// The specialization `t = 0`.
    pub fn at_t_zero(&self) -> Result<Self> {
        if self.q.valuation().is_some_and(|v| v < 0) {
            return Err(Error::Precondition(format!("q = {} has a pole at t = 0", self.q)));
        }
        Self::new(Scalar::constant(self.q.coeff(0), self.q.precision()), self.conventions)
    }

    /// The chart torus algebra.
    pub fn torus(&self) -> Result<Arc<Algebra>> {
        Algebra::new(self.conventions.twist(), self.q.clone())
    }
}

/// Strict inequality `a x + b y < c`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        &self.a * &x[0] + &self.b * &x[1] < self.c
    }

    pub fn closure_contains(&self, x: &[Rational]) -> bool {
        &self.a * &x[0] + &self.b * &x[1] <= self.c
    }
}

/// A finite union of finite intersections of open half-planes.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pieces: Vec<Vec<HalfPlane>>,
}

impl Region {
    pub fn new(pieces: Vec<Vec<HalfPlane>>) -> Self {
        Region { pieces }
    }

    /// `U_1 = {x < eps |y|}`.
    pub fn u1() -> Self {
        let e = epsilon();
        Region::new(vec![
            vec![HalfPlane::new(int(1), -e.clone(), int(0))],
            vec![HalfPlane::new(int(1), e, int(0))],
        ])
    }

    /// `U_2 = {x > 0, y < eps x}`.
    pub fn u2() -> Self {
        Self::below_slope(epsilon())
    }

    /// `U_2' = {x > 0, y < eps/(1+eps) x}`.
    pub fn u2_prime() -> Self {
        let e = epsilon();
        Self::below_slope(&e / (int(1) + &e))
    }

    /// `U_3 = {x > 0, y > 0}`.
    pub fn u3() -> Self {
        Region::new(vec![vec![HalfPlane::new(int(-1), int(0), int(0)), HalfPlane::new(int(0), int(-1), int(0))]])
    }

    fn below_slope(s: Rational) -> Self {
        Region::new(vec![vec![HalfPlane::new(int(-1), int(0), int(0)), HalfPlane::new(-s, int(1), int(0))]])
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == 2 && self.pieces.iter().any(|p| p.iter().all(|h| h.contains(x)))
    }

    /// Membership in the closure of the region.
    pub fn closure_contains(&self, x: &[Rational]) -> bool {
        x.len() == 2 && self.pieces.iter().any(|p| p.iter().all(|h| h.closure_contains(x)))
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                pieces.push(a.iter().chain(b).cloned().collect());
            }
        }
        Region { pieces }
    }

    /// Points `(a/2, b/2)` with `|a|, |b| <= n` inside the region.
    pub fn grid(&self, n: u32) -> Vec<Vec<Rational>> {
        let n = n as i64;
        let mut out = Vec::new();
        for a in -n..=n {
            for b in -n..=n {
                let x = vec![rat(a, 2), rat(b, 2)];
                if self.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }
}

/// Chart `i`: the torus images `(A_i, B_i, C_i)` of `alpha, beta, gamma`
/// and the domain of `pi_i`.
#[derive(Clone, Debug)]
pub struct ChartModel {
    pub index: u8,
    pub algebra: Arc<Algebra>,
    pub images: [Element; 3],
    pub region: Region,
}

impl ChartModel {
    /// * `g_1 = (xi^{-1}, xi (1 + eta), eta^{-1})` on `U_1`,
    /// * `g_2 = ((1 + eta) xi^{-1}, xi, eta^{-1})` on `U_2'`,
    /// * `g_3 = ((1 + eta) (xi eta)^{-1}, xi eta, eta^{-1})` on `U_3`.
    pub fn new(index: u8, pres: &KThreePresentation) -> Result<Self> {
        let alg = pres.torus()?;
        let xi = alg.generator(0, Domain::Torus);
        let eta = alg.generator(1, Domain::Torus);
        let one_eta = alg.one(Domain::Torus).try_add(&eta)?;
        let (images, region) = match index {
            1 => ([xi.monomial_inverse()?, xi.try_mul(&one_eta)?, eta.monomial_inverse()?], Region::u1()),
            2 => ([one_eta.try_mul(&xi.monomial_inverse()?)?, xi.clone(), eta.monomial_inverse()?], Region::u2_prime()),
            3 => {
                let xe = xi.try_mul(&eta)?;
                ([one_eta.try_mul(&xe.monomial_inverse()?)?, xe, eta.monomial_inverse()?], Region::u3())
            }
            _ => return Err(Error::Precondition(format!("chart index {index} not in 1..=3"))),
        };
        Ok(ChartModel { index, algebra: alg, images, region })
    }

    /// `pi_i` on a point of the closed chart domain: the identity for charts 1
    /// and 3; for chart 2, `(x, y)` if `y < 0` and `(x - y, y)` otherwise.
    pub fn projection(&self, x: &[Rational]) -> Result<[Rational; 2]> {
        self.check_point(x)?;
        if self.index == 2 && x[1] >= int(0) {
            return Ok([&x[0] - &x[1], x[1].clone()]);
        }
        Ok([x[0].clone(), x[1].clone()])
    }

    fn check_point(&self, x: &[Rational]) -> Result<()> {
        if x.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: x.len() });
        }
        if !self.region.closure_contains(x) {
            return Err(Error::Precondition(format!(
                "point ({}, {}) lies outside the domain of chart {}",
                x[0], x[1], self.index
            )));
        }
        Ok(())
    }
}

pub fn standard_charts(pres: &KThreePresentation) -> Result<[ChartModel; 3]> {
    Ok([ChartModel::new(1, pres)?, ChartModel::new(2, pres)?, ChartModel::new(3, pres)?])
}

fn degree(x: &Element) -> u32 {
    x.terms().map(|(e, _)| e.iter().map(|a| a.unsigned_abs()).sum::<u64>() as u32).max().unwrap_or(0)
}

/// Largest total degree any product in the relations can reach.
pub fn required_order(chart: &ChartModel, pres: &KThreePresentation) -> u32 {
    pres.relations
        .iter()
        .flat_map(|r| r.terms().map(|(w, _)| w.iter().map(|&l| degree(&chart.images[l as usize])).sum::<u32>()))
        .max()
        .unwrap_or(0)
}

/// The four relations evaluated at the chart images. With `order` the
/// computation is truncated at that total degree, which must be at least
/// [`required_order`] so that nothing is lost.
pub fn verify_chart_homomorphism(chart: &ChartModel, pres: &KThreePresentation, order: Option<u32>) -> Result<Vec<Element>> {
    if !chart.algebra.same_as(&*pres.torus()?) {
        return Err(Error::Incompatible(format!("chart {} was built for different conventions or q", chart.index)));
    }
    if let Some(d) = order {
        let need = required_order(chart, pres);
        if d < need {
            return Err(Error::Precondition(format!("order {d} is below the degree {need} reached by the relations")));
        }
    }
    let images: Vec<Element> = chart.images.iter().map(|x| x.clone().with_truncation(order)).collect();
    pres.relations.iter().map(|r| r.substitute(&images)).collect()
}

/// For every convention set, whether all three charts satisfy all relations.
pub fn convention_search(q: &Scalar) -> Result<Vec<(Conventions, bool)>> {
    let mut out = Vec::new();
    for conv in Conventions::all() {
        let pres = KThreePresentation::new(q.clone(), conv)?;
        let mut ok = true;
        for chart in standard_charts(&pres)? {
            ok &= verify_chart_homomorphism(&chart, &pres, None)?.iter().all(|r| r.is_zero());
        }
        out.push((conv, ok));
    }
    Ok(out)
}

/// The unique consistent convention set; an error if there are none or
/// several (as happens at `q = 1`).
pub fn select_conventions(q: &Scalar) -> Result<Conventions> {
    let good: Vec<Conventions> = convention_search(q)?.into_iter().filter(|(_, ok)| *ok).map(|(c, _)| c).collect();
    match good.as_slice() {
        [c] => Ok(*c),
        _ => Err(Error::Incompatible(format!("{} consistent convention sets, expected exactly one", good.len()))),
    }
}

/// `f(alpha, beta, gamma) = (max(0, log|alpha|), max(0, log|beta|), log|gamma|)`
/// at a monomial point of the closed chart domain.
pub fn map_f(chart: &ChartModel, point: &SpectrumPoint) -> Result<[Rational; 3]> {
    let SpectrumPoint::Monomial { x } = point else {
        return Err(Error::Precondition("f is evaluated at monomial points only".into()));
    };
    chart.check_point(x)?;
    let log = |k: usize| -> Result<Rational> {
        match monomial_eval(&chart.images[k], x)? {
            LogNorm::Finite(r) => Ok(r),
            LogNorm::Bottom => Err(Error::Precondition("zero generator image".into())),
        }
    };
    let zero = int(0);
    Ok([log(0)?.max(zero.clone()), log(1)?.max(zero), log(2)?])
}

/// `j(x, y) = (-x, max(x + y, 0), -y)` for `x <= 0` and
/// `(0, x + max(y, 0), -y)` for `x >= 0`.
pub fn embed_j(x: &Rational, y: &Rational) -> [Rational; 3] {
    let zero = int(0);
    if *x <= zero {
        [-x, (x + y).max(zero), -y]
    } else {
        [zero.clone(), x + y.clone().max(zero), -y]
    }
}

/// `j^{-1}` on the image of `j`.
pub fn project_pi(v: &[Rational]) -> Result<[Rational; 2]> {
    if v.len() != 3 {
        return Err(Error::Dimension { expected: 3, got: v.len() });
    }
    let zero = int(0);
    let y = -&v[2];
    let x = if v[0] > zero { -&v[0] } else { &v[1] - y.clone().max(zero) };
    if embed_j(&x, &y).as_slice() != v {
        return Err(Error::Precondition(format!("({}, {}, {}) is not in the image of j", v[0], v[1], v[2])));
    }
    Ok([x, y])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    #[serde(with = "rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub f: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub j_pi: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub chart: u8,
    pub points: usize,
    /// Points whose projection has `x < 0`, `x = 0`, `x > 0`.
    pub j_branches: [usize; 3],
    /// Points on the first (`y < 0`) and second branch of `pi_2`; chart 2 only.
    pub pi_branches: [usize; 2],
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `j(pi_i(x)) = f(g_i at x)` and `j^{-1}(f) = pi_i(x)` at every point.
pub fn compatibility_sweep(chart: &ChartModel, points: &[Vec<Rational>]) -> Result<SweepReport> {
    let zero = int(0);
    let mut report = SweepReport { chart: chart.index, points: points.len(), j_branches: [0; 3], pi_branches: [0; 2], failures: Vec::new() };
    for x in points {
        let p = chart.projection(x)?;
        let f = map_f(chart, &SpectrumPoint::monomial(x.clone()))?;
        let jp = embed_j(&p[0], &p[1]);
        report.j_branches[match p[0].cmp(&zero) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 2,
        }] += 1;
        if chart.index == 2 {
            report.pi_branches[usize::from(x[1] >= zero)] += 1;
        }
        let back = project_pi(&f).ok();
        if f != jp || back.as_ref() != Some(&p) {
            report.failures.push(SweepFailure { point: x.clone(), f: f.to_vec(), j_pi: jp.to_vec() });
        }
    }
    Ok(report)
}

/// The two overlaps carrying a nontrivial gluing automorphism of chart 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Overlap {
    #[serde(rename = "u1_u2")]
    U1U2,
    #[serde(rename = "u1_u3")]
    U1U3,
}

impl Overlap {
    pub fn region(&self) -> Region {
        match self {
            Overlap::U1U2 => Region::u1().intersect(&Region::u2()),
            Overlap::U1U3 => Region::u1().intersect(&Region::u3()),
        }
    }

    /// The other chart: 2 or 3.
    pub fn target(&self) -> u8 {
        match self {
            Overlap::U1U2 => 2,
            Overlap::U1U3 => 3,
        }
    }

    /// Exponent of the monomial that is small on the overlap: `eta` on
    /// `U_1 cap U_2`, `eta^{-1}` on `U_1 cap U_3`.
    pub fn small(&self) -> [i64; 2] {
        match self {
            Overlap::U1U2 => [0, 1],
            Overlap::U1U3 => [0, -1],
        }
    }

    fn cone(&self, order: u32) -> Result<Cone> {
        match self {
            Overlap::U1U2 => Cone::new([0, -1], [1, 0], order),
            Overlap::U1U3 => Ok(Cone::standard(order)),
        }
    }

    /// `phi(xi, eta) = (xi (1 + s), eta)` with `s` the small monomial.
    pub fn automorphism(&self, algebra: &Arc<Algebra>, order: u32) -> Result<WallAutomorphism> {
        let p = algebra.precision();
        let one = algebra.one(Domain::Torus);
        let u = one.try_add(&algebra.monomial(self.small().to_vec(), Scalar::one(p), Domain::Torus)?)?;
        WallAutomorphism::from_factors(algebra, self.cone(order)?, u, one)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSample {
    #[serde(with = "rational_vec")]
    pub point: Vec<Rational>,
    /// `log|s|`, negative on the overlap.
    pub small: LogNorm,
    /// `log|1 + s|`.
    pub unit: LogNorm,
    /// `log|(1 + s) r_D - 1|` for the order-`D` geometric partial sum `r_D`.
    pub inverse_defect: LogNorm,
}

impl UnitSample {
    pub fn certified(&self) -> bool {
        self.small < LogNorm::zero() && self.unit == LogNorm::zero() && self.inverse_defect < LogNorm::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentificationReport {
    /// `(xi_2, eta_2) -> (xi_3 eta_3, eta_3) -> back` is the identity.
    pub roundtrip: bool,
    /// The identification carries the chart-2 images onto the chart-3 images.
    pub matches_charts: bool,
}

impl IdentificationReport {
    pub fn passed(&self) -> bool {
        self.roundtrip && self.matches_charts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueReport {
    pub overlap: Overlap,
    pub order: u32,
    pub commutation_exact: bool,
    pub inverse_ok: bool,
    /// `g_target o phi = g_1` up to terms of degree above the order in `s`.
    pub charts_agree: bool,
    pub samples: Vec<UnitSample>,
    pub identification: IdentificationReport,
}

impl GlueReport {
    pub fn units_certified(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(UnitSample::certified)
    }

    pub fn passed(&self) -> bool {
        self.commutation_exact && self.inverse_ok && self.charts_agree && self.units_certified() && self.identification.passed()
    }
}

/// Runs the gluing checks on one overlap with automorphisms truncated at
/// `order` and unit checks at the points of `overlap.region().grid(grid)`.
pub fn glue_automorphism_check(pres: &KThreePresentation, overlap: Overlap, order: u32, grid: u32) -> Result<GlueReport> {
    let alg = pres.torus()?;
    let phi = overlap.automorphism(&alg, order)?;
    let (x, y) = phi.images()?;
    let c = alg.twist().commutation(&[1, 0], &[0, 1]);
    let commutation_exact = x.try_mul(&y)?.try_sub(&y.try_mul(&x)?.scale(&alg.q_pow(c)))?.is_zero();

    let psi = phi.invert()?;
    let inverse_ok = phi.compose(&psi)?.is_identity() && psi.compose(&phi)?.is_identity();

    let g1 = ChartModel::new(1, pres)?;
    let target = ChartModel::new(overlap.target(), pres)?;
    let small = overlap.small();
    let mut charts_agree = true;
    for k in 0..3 {
        let d = phi.apply(&target.images[k])?.try_sub(&g1.images[k])?;
        charts_agree &= d.terms().all(|(e, _)| e[0] * small[0] + e[1] * small[1] > order as i64);
    }

    let p = alg.precision();
    let one = alg.one(Domain::Torus);
    let s = alg.monomial(small.to_vec(), Scalar::one(p), Domain::Torus)?;
    let unit = one.try_add(&s)?;
    let mut partial = alg.zero(Domain::Torus);
    let mut power = one.clone();
    let minus_s = s.scale(&Scalar::from_int(-1, p));
    for _ in 0..=order {
        partial = partial.try_add(&power)?;
        power = power.try_mul(&minus_s)?;
    }
    let defect = unit.try_mul(&partial)?.try_sub(&one)?;
    let samples = overlap
        .region()
        .grid(grid)
        .into_iter()
        .map(|pt| {
            Ok(UnitSample {
                small: monomial_eval(&s, &pt)?,
                unit: monomial_eval(&unit, &pt)?,
                inverse_defect: monomial_eval(&defect, &pt)?,
                point: pt,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GlueReport {
        overlap,
        order,
        commutation_exact,
        inverse_ok,
        charts_agree,
        samples,
        identification: identification_check(pres)?,
    })
}

/// `m(a) -> c_a^{-1} X^{a_1} Y^{a_2}` where `xi^{a_1} eta^{a_2} = c_a m(a)`.
fn monomial_substitution(x: &Element, images: [&Element; 2]) -> Result<Element> {
    let alg = x.algebra();
    let gens = [alg.generator(0, Domain::Torus), alg.generator(1, Domain::Torus)];
    let signed_pow = |g: &Element, k: i64| -> Result<Element> {
        let base = if k < 0 { g.monomial_inverse()? } else { g.clone() };
        base.pow(k.unsigned_abs() as u32)
    };
    let mut out = alg.zero(Domain::Torus);
    for (a, c) in x.terms() {
        let ordered = signed_pow(&gens[0], a[0])?.try_mul(&signed_pow(&gens[1], a[1])?)?;
        let ca = ordered.coeff(a);
        let image = signed_pow(images[0], a[0])?.try_mul(&signed_pow(images[1], a[1])?)?;
        out = out.try_add(&image.scale(&c.div(&ca)?))?;
    }
    Ok(out)
}

/// The identification `(xi_2, eta_2) = (xi_3 eta_3, eta_3)` on `U_2 cap U_3`.
pub fn identification_check(pres: &KThreePresentation) -> Result<IdentificationReport> {
    let g2 = ChartModel::new(2, pres)?;
    let g3 = ChartModel::new(3, pres)?;
    let alg = &g2.algebra;
    let xi = alg.generator(0, Domain::Torus);
    let eta = alg.generator(1, Domain::Torus);
    let forward_xi = xi.try_mul(&eta)?;
    let back_xi = xi.try_mul(&eta.monomial_inverse()?)?;
    let forward = |x: &Element| monomial_substitution(x, [&forward_xi, &eta]);
    let back = |x: &Element| monomial_substitution(x, [&back_xi, &eta]);

    let mut samples = vec![xi.clone(), eta.clone(), xi.monomial_inverse()?, eta.monomial_inverse()?];
    samples.extend(g2.images.iter().cloned());
    samples.extend(g3.images.iter().cloned());
    samples.push(alg.element(
        [(vec![2, -1], Scalar::from_int(3, alg.precision())), (vec![-1, 3], pres.q.clone())],
        Domain::Torus,
        None,
    )?);
    let mut roundtrip = true;
    for s in &samples {
        roundtrip &= back(&forward(s)?)? == *s && forward(&back(s)?)? == *s;
    }
    let mut matches_charts = true;
    for k in 0..3 {
        matches_charts &= forward(&g2.images[k])? == g3.images[k];
    }
    Ok(IdentificationReport { roundtrip, matches_charts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres() -> KThreePresentation {
        KThreePresentation::standard(16).unwrap()
    }

    fn pt(x: i64, y: i64) -> SpectrumPoint {
        SpectrumPoint::monomial(vec![int(x), int(y)])
    }

    #[test]
    fn chart_one_last_relation_by_hand() {
        let p = pres();
        let c = ChartModel::new(1, &p).unwrap();
        let eta = c.algebra.generator(1, Domain::Torus);
        let ab = c.images[0].try_mul(&c.images[1]).unwrap();
        assert_eq!(ab.try_sub(&c.algebra.one(Domain::Torus)).unwrap(), eta);
        let r = verify_chart_homomorphism(&c, &p, None).unwrap();
        assert!(r[3].is_zero());
    }

    #[test]
    fn map_f_examples() {
        let p = pres();
        let c1 = ChartModel::new(1, &p).unwrap();
        let c2 = ChartModel::new(2, &p).unwrap();
        assert_eq!(map_f(&c1, &pt(-1, 2)).unwrap(), [int(1), int(1), int(-2)]);
        assert_eq!(map_f(&c1, &pt(0, 0)).unwrap(), [int(0), int(0), int(0)]);
        assert_eq!(map_f(&c2, &pt(2, -1)).unwrap(), [int(0), int(2), int(1)]);
        assert!(map_f(&c1, &pt(1, 1)).is_err());
    }

    #[test]
    fn j_examples() {
        assert_eq!(embed_j(&int(-1), &int(2)), [int(1), int(1), int(-2)]);
        assert_eq!(embed_j(&int(2), &int(-1)), [int(0), int(2), int(1)]);
        assert_eq!(embed_j(&int(0), &int(3)), [int(0), int(3), int(-3)]);
        assert!(project_pi(&[int(1), int(-1), int(0)]).is_err());
    }

    #[test]
    fn pi_two_shifts_on_second_branch() {
        let c2 = ChartModel::new(2, &pres()).unwrap();
        assert_eq!(c2.projection(&[int(6), int(1)]).unwrap(), [int(5), int(1)]);
        assert_eq!(c2.projection(&[int(6), int(-1)]).unwrap(), [int(6), int(-1)]);
        assert!(c2.projection(&[int(-1), int(0)]).is_err());
    }

    #[test]
    fn regions() {
        assert!(Region::u1().contains(&[int(-1), int(0)]));
        assert!(!Region::u1().contains(&[int(0), int(0)]));
        assert!(Region::u2_prime().contains(&[int(3), rat(9, 10)]));
        assert!(!Region::u2_prime().contains(&[int(3), int(1)]));
        let o = Overlap::U1U2.region();
        assert!(o.contains(&[int(1), int(-3)]) && !o.contains(&[int(1), int(-2)]));
    }

    #[test]
    fn order_below_requirement_is_rejected() {
        let p = pres();
        let c = ChartModel::new(3, &p).unwrap();
        assert!(verify_chart_homomorphism(&c, &p, Some(1)).is_err());
        let need = required_order(&c, &p);
        assert!(verify_chart_homomorphism(&c, &p, Some(need)).unwrap().iter().all(|r| r.is_zero()));
    }
}
