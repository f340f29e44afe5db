//! Points of the Berkovich spectrum of quantum polydiscs and quantum tori.
//!
//! Three kinds of points are supported: the monomial (skeleton) points
//! `nu_x(f) = max |a_l| e^{l.x}`, and the shifted points `nu_{a,rho}` which
//! rewrite `f` in the shifted variables `t_i = T_i - a_i` and take the Gauss
//! norm of the result at radii `e^rho`. On the torus, negative powers of
//! `T_i = t_i + a_i` are expanded by the geometric series
//! `(t_i + a_i)^{-1} = t_i^{-1} sum_m (-a_i/t_i)^m`, truncated at a tail
//! order `M`, and the value is returned together with a sound bound on the
//! discarded tail.
//!
//! All seminorm values are [`LogNorm`]s. The membership predicates here are
//! finite-sample semi-decisions: a passing report proves nothing about
//! elements that were not sampled.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{int, Rational};
use crate::qalg::{Domain, TwistForm};
use crate::scalars::LogNorm;
use crate::{Algebra, Element, Scalar};

/// Descriptor of a seminorm on a quantum polydisc or quantum torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumPoint {
    Monomial {
        #[serde(with = "rational_vec")]
        x: Vec<Rational>,
    },
    ShiftedPolydisc {
        a: Vec<Scalar>,
        #[serde(with = "rational_vec")]
        rho: Vec<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational_vec")]
        radius: Option<Vec<Rational>>,
    },
    ShiftedTorus {
        a: Vec<Scalar>,
        #[serde(with = "rational_vec")]
        rho: Vec<Rational>,
        tail_order: u32,
    },
}

impl SpectrumPoint {
    pub fn monomial(x: Vec<Rational>) -> Self {
        SpectrumPoint::Monomial { x }
    }

    /// Requires `log|a_i| <= rho_i`, and `rho_i < r_i` when an ambient
    /// radius is given.
    pub fn shifted_polydisc(
        a: Vec<Scalar>,
        rho: Vec<Rational>,
        radius: Option<Vec<Rational>>,
    ) -> Result<Self> {
        let p = SpectrumPoint::ShiftedPolydisc { a, rho, radius };
        p.validate()?;
        Ok(p)
    }

    /// Requires `log|a_i| < rho_i` strictly and `tail_order >= 1`.
    pub fn shifted_torus(a: Vec<Scalar>, rho: Vec<Rational>, tail_order: u32) -> Result<Self> {
        let p = SpectrumPoint::ShiftedTorus { a, rho, tail_order };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        match self {
            SpectrumPoint::Monomial { x } => x.len(),
            SpectrumPoint::ShiftedPolydisc { rho, .. } | SpectrumPoint::ShiftedTorus { rho, .. } => {
                rho.len()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumPoint::Monomial { .. } => Ok(()),
            SpectrumPoint::ShiftedPolydisc { a, rho, radius } => {
                check_len(a.len(), rho.len())?;
                for (i, (ai, ri)) in a.iter().zip(rho).enumerate() {
                    if ai.lognorm() > LogNorm::Finite(ri.clone()) {
                        return Err(Error::Precondition(format!(
                            "log|a_{i}| = {} exceeds rho_{i} = {ri}",
                            ai.lognorm()
                        )));
                    }
                }
                if let Some(r) = radius {
                    check_len(r.len(), rho.len())?;
                    if let Some(i) = (0..r.len()).find(|&i| rho[i] >= r[i]) {
                        return Err(Error::Precondition(format!(
                            "rho_{i} = {} is not below the ambient radius {}",
                            rho[i], r[i]
                        )));
                    }
                }
                Ok(())
            }
            SpectrumPoint::ShiftedTorus { a, rho, tail_order } => {
                check_len(a.len(), rho.len())?;
                if *tail_order == 0 {
                    return Err(Error::Precondition("tail order must be at least 1".into()));
                }
                for (i, (ai, ri)) in a.iter().zip(rho).enumerate() {
                    if ai.lognorm() >= LogNorm::Finite(ri.clone()) {
                        return Err(Error::Precondition(format!(
                            "torus points need log|a_{i}| < rho_{i} strictly; got {} vs {ri}",
                            ai.lognorm()
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates the seminorm on `f`. Shifted torus points may return an
    /// uncertified value; see [`Evaluation::certified_value`].
    pub fn evaluate(&self, f: &Element) -> Result<Evaluation> {
        self.validate()?;
        match self {
            SpectrumPoint::Monomial { x } => Ok(Evaluation::exact(monomial_eval(f, x)?)),
            SpectrumPoint::ShiftedPolydisc { a, rho, .. } => {
                Ok(Evaluation::exact(shifted_eval_polydisc(f, a, rho)?))
            }
            SpectrumPoint::ShiftedTorus { a, rho, tail_order } => {
                shifted_eval_torus(f, a, rho, *tail_order)
            }
        }
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// A seminorm value with the bound on what a truncated expansion discarded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: LogNorm,
    /// Every discarded contribution has weighted log-norm at most this.
    pub tail_bound: LogNorm,
    /// `value` is the exact seminorm (it strictly dominates the tail).
    pub certified: bool,
}

impl Evaluation {
    fn exact(value: LogNorm) -> Self {
        Evaluation { value, tail_bound: LogNorm::Bottom, certified: true }
    }

    pub fn certified_value(&self) -> Result<LogNorm> {
        if self.certified {
            Ok(self.value.clone())
        } else {
            Err(Error::Uncertified(format!(
                "computed {} does not dominate the tail bound {}; raise the tail order",
                self.value, self.tail_bound
            )))
        }
    }
}

/// `nu_x(f) = max_l (log|a_l| + l.x)`.
pub fn monomial_eval(f: &Element, x: &[Rational]) -> Result<LogNorm> {
    f.gauss_norm(x)
}

/// The lower-triangular form with the same commutation form: in it `m(l)` is
/// the ordered monomial `T_1^{l_1} ... T_d^{l_d}`.
pub fn ordered_basis(twist: &TwistForm) -> TwistForm {
    let d = twist.dim();
    let mut m = vec![vec![0; d]; d];
    for (j, row) in m.iter_mut().enumerate() {
        for (i, slot) in row.iter_mut().enumerate().take(j) {
            *slot = twist.entry(j, i) - twist.entry(i, j);
        }
    }
    TwistForm::new(m).expect("square")
}

fn to_ordered(f: &Element) -> Result<Element> {
    let target = ordered_basis(f.algebra().twist());
    if &target == f.algebra().twist() {
        Ok(f.clone())
    } else {
        f.rebase(&target)
    }
}

/// `binom(n, k)` for any integer `n` and `k >= 0`.
fn binomial(n: i64, k: u32) -> Rational {
    let mut acc = int(1);
    for j in 0..k as i64 {
        acc = acc * int(n - j) / int(j + 1);
    }
    acc
}

/// Expansion of `(t + a)^n` as `(t-exponent, coefficient)` pairs, keeping
/// `a^k` for `k <= max_k` (exhaustive when `n >= 0` and `max_k >= n`).
fn shifted_power(a: &Scalar, n: i64, max_k: u32) -> Vec<(i64, Scalar)> {
    let p = a.precision();
    let top = if n >= 0 { (n as u32).min(max_k) } else { max_k };
    let mut out = Vec::with_capacity(top as usize + 1);
    let mut a_pow = Scalar::one(p);
    for k in 0..=top {
        let c = a_pow.scale(&binomial(n, k));
        if !c.is_zero() {
            out.push((n - k as i64, c));
        }
        if a.is_zero() {
            break;
        }
        a_pow = &a_pow * a;
    }
    out
}

fn expand_shifted(
    f: &Element,
    a: &[Scalar],
    max_k: u32,
) -> BTreeMap<Vec<i64>, Scalar> {
    let mut coeffs: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
    for (n, c) in f.terms() {
        let mut partial: Vec<(Vec<i64>, Scalar)> = vec![(Vec::with_capacity(n.len()), c.clone())];
        for (i, &ni) in n.iter().enumerate() {
            let factors = shifted_power(&a[i], ni, max_k);
            let mut next = Vec::with_capacity(partial.len() * factors.len());
            for (e, pc) in &partial {
                for (ti, fc) in &factors {
                    let mut e2 = e.clone();
                    e2.push(*ti);
                    next.push((e2, pc * fc));
                }
            }
            partial = next;
        }
        for (e, v) in partial {
            let slot = coeffs.entry(e).or_insert_with(|| Scalar::zero(v.precision()));
            *slot = &*slot + &v;
        }
    }
    coeffs
}

fn weighted_max(coeffs: &BTreeMap<Vec<i64>, Scalar>, rho: &[Rational]) -> LogNorm {
    coeffs
        .iter()
        .map(|(m, b)| b.lognorm().shift(&crate::qalg::dot(m, rho)))
        .max()
        .unwrap_or(LogNorm::Bottom)
}

fn check_q_close_to_one(f: &Element) -> Result<()> {
    let q = f.algebra().q();
    let one = Scalar::one(q.precision());
    if (&one - q).lognorm() >= LogNorm::zero() {
        return Err(Error::Precondition(format!("shifted points need |1 - q| < 1, got q = {q}")));
    }
    Ok(())
}

/// `nu_{a,rho}(f) = max_n |b_n| e^{n.rho}` where `f = sum b_n t^n` in the
/// ordered shifted variables `t_i = T_i - a_i`.
pub fn shifted_eval_polydisc(f: &Element, a: &[Scalar], rho: &[Rational]) -> Result<LogNorm> {
    check_len(a.len(), f.dim())?;
    check_len(rho.len(), f.dim())?;
    for (i, (ai, ri)) in a.iter().zip(rho).enumerate() {
        if ai.lognorm() > LogNorm::Finite(ri.clone()) {
            return Err(Error::Precondition(format!("log|a_{i}| exceeds rho_{i}")));
        }
    }
    if f.terms().any(|(e, _)| e.iter().any(|&x| x < 0)) {
        return Err(Error::Precondition("polydisc evaluation needs non-negative exponents".into()));
    }
    check_q_close_to_one(f)?;
    let f = to_ordered(f)?;
    let max_deg = f.terms().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0);
    Ok(weighted_max(&expand_shifted(&f, a, max_deg as u32), rho))
}

/// Shifted evaluation on the quantum torus with the negative powers expanded
/// to tail order `tail_order`.
///
/// Each dropped term of `c_n (t+a)^n` has weighted log-norm at most
/// `log|c_n| + n.rho - (M+1) delta` with `delta = min_i (rho_i - log|a_i|)`,
/// because generalized binomial coefficients are integers. The returned
/// value is certified when it strictly exceeds that bound: then the tail
/// cannot change the maximum.
pub fn shifted_eval_torus(
    f: &Element,
    a: &[Scalar],
    rho: &[Rational],
    tail_order: u32,
) -> Result<Evaluation> {
    check_len(a.len(), f.dim())?;
    check_len(rho.len(), f.dim())?;
    let mut delta: Option<Rational> = None;
    for (i, (ai, ri)) in a.iter().zip(rho).enumerate() {
        match ai.lognorm() {
            LogNorm::Bottom => {}
            LogNorm::Finite(la) => {
                if &la >= ri {
                    return Err(Error::Precondition(format!(
                        "delta_{i} = rho_{i} - log|a_{i}| must be positive"
                    )));
                }
                let d = ri - la;
                delta = Some(match delta {
                    Some(prev) if prev <= d => prev,
                    _ => d,
                });
            }
        }
    }
    check_q_close_to_one(f)?;
    let f = to_ordered(f)?;
    let value = weighted_max(&expand_shifted(&f, a, tail_order), rho);

    let truncates = f
        .terms()
        .any(|(n, _)| n.iter().zip(a).any(|(&ni, ai)| ni < 0 && !ai.is_zero()));
    let tail_bound = match (&delta, truncates) {
        (Some(delta), true) => {
            let top = f.gauss_norm(rho)?;
            top.shift(&-(delta * int(tail_order as i64 + 1)))
        }
        _ => LogNorm::Bottom,
    };
    let certified = tail_bound.is_bottom() || value > tail_bound;
    Ok(Evaluation { value, tail_bound, certified })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MultiplicativityReport {
    pub checked: usize,
    /// `(pair index, nu(fg), nu(f) + nu(g))` for each disagreement.
    pub failures: Vec<(usize, LogNorm, LogNorm)>,
    /// Pairs where some value could not be certified.
    pub uncertified: Vec<usize>,
}

impl MultiplicativityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.uncertified.is_empty()
    }
}

/// Checks `nu(fg) = nu(f) + nu(g)` on every sample pair.
pub fn check_point_multiplicative(
    point: &SpectrumPoint,
    pairs: &[(Element, Element)],
) -> Result<MultiplicativityReport> {
    point.validate()?;
    let mut report = MultiplicativityReport::default();
    for (idx, (f, g)) in pairs.iter().enumerate() {
        let fg = f.try_mul(g)?;
        let vals = [point.evaluate(&fg)?, point.evaluate(f)?, point.evaluate(g)?];
        report.checked += 1;
        if vals.iter().any(|v| !v.certified) {
            report.uncertified.push(idx);
            continue;
        }
        let lhs = vals[0].value.clone();
        let rhs = &vals[1].value + &vals[2].value;
        if lhs != rhs {
            report.failures.push((idx, lhs, rhs));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub unit_ok: bool,
    pub submultiplicative_failures: Vec<(usize, usize)>,
    pub bounded_failures: Vec<usize>,
}

impl BoundednessReport {
    pub fn passed(&self) -> bool {
        self.unit_ok && self.submultiplicative_failures.is_empty() && self.bounded_failures.is_empty()
    }
}

/// Finite-sample check that `nu` is a bounded submultiplicative seminorm:
/// `nu(1) = 0`, `nu(fg) <= nu(f) + nu(g)` on all sample pairs, and
/// `nu(f) <= log_c + ambient(f)` on all samples.
pub fn check_submultiplicative_bounded<N, A>(
    nu: N,
    ambient: A,
    log_c: &Rational,
    one: &Element,
    samples: &[Element],
) -> Result<BoundednessReport>
where
    N: Fn(&Element) -> Result<LogNorm>,
    A: Fn(&Element) -> Result<LogNorm>,
{
    let mut report = BoundednessReport { unit_ok: nu(one)? == LogNorm::zero(), ..Default::default() };
    let values: Vec<LogNorm> = samples.iter().map(&nu).collect::<Result<_>>()?;
    for (i, f) in samples.iter().enumerate() {
        if values[i] > ambient(f)?.shift(log_c) {
            report.bounded_failures.push(i);
        }
        for (j, g) in samples.iter().enumerate() {
            let fg = f.try_mul(g)?;
            if nu(&fg)? > &values[i] + &values[j] {
                report.submultiplicative_failures.push((i, j));
            }
        }
    }
    Ok(report)
}

/// `x -> nu_x`, the monomial point over `x`.
pub fn skeleton_embed(x: Vec<Rational>) -> SpectrumPoint {
    SpectrumPoint::monomial(x)
}

/// `(log|T_1|_p, ..., log|T_d|_p)`.
pub fn skeleton_retract(point: &SpectrumPoint, algebra: &std::sync::Arc<Algebra>) -> Result<Vec<Rational>> {
    check_len(point.dim(), algebra.dim())?;
    let domain = match point {
        SpectrumPoint::ShiftedPolydisc { .. } => Domain::Polydisc,
        _ => Domain::Torus,
    };
    (0..algebra.dim())
        .map(|i| {
            let v = point.evaluate(&algebra.generator(i, domain))?.certified_value()?;
            v.finite()
                .cloned()
                .ok_or_else(|| Error::Precondition("generator evaluates to zero".into()))
        })
        .collect()
}

pub(crate) mod rational_vec {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| {
                crate::field::parse_rational(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .collect()
    }
}

pub(crate) mod opt_rational_vec {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(|r| r.to_string())),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|v| {
            v.iter()
                .map(|s| {
                    crate::field::parse_rational(s)
                        .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
                })
                .collect()
        })
        .transpose()
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use std::sync::Arc;

    const N: i64 = 16;

    fn q() -> Scalar {
        Scalar::from_terms([(0, int(1)), (1, int(1))], N)
    }

    fn alg(d: usize) -> Arc<Algebra> {
        Algebra::new(TwistForm::ordered(d), q()).unwrap()
    }

    fn mono(alg: &Arc<Algebra>, e: &[i64], c: Scalar, domain: Domain) -> Element {
        alg.monomial(e.to_vec(), c, domain).unwrap()
    }

    fn one() -> Scalar {
        Scalar::one(N)
    }

    #[test]
    fn monomial_point_examples() {
        let a2 = alg(2);
        let f = &mono(&a2, &[1, 0], one(), Domain::Torus) + &mono(&a2, &[0, 1], one(), Domain::Torus);
        assert_eq!(monomial_eval(&f, &[int(0), int(-1)]).unwrap(), LogNorm::zero());
        let g = mono(&a2, &[-1, 0], Scalar::t(N), Domain::Torus);
        assert_eq!(monomial_eval(&g, &[int(1), int(0)]).unwrap(), LogNorm::Finite(int(-2)));
    }

    #[test]
    fn shifted_linear_and_square() {
        let a1 = alg(1);
        let t = Scalar::t(N);
        let pt = [t.clone()];
        let rho = [int(-1)];
        let x = mono(&a1, &[1], one(), Domain::Polydisc);
        assert_eq!(shifted_eval_polydisc(&x, &pt, &rho).unwrap(), LogNorm::Finite(int(-1)));
        // (t1 + a)^2 = t1^2 + 2 a t1 + a^2: weights -2, -2, -2
        let x2 = &x * &x;
        assert_eq!(shifted_eval_polydisc(&x2, &pt, &rho).unwrap(), LogNorm::Finite(int(-2)));
    }

    #[test]
    fn shifted_two_variable_product() {
        let a2 = alg(2);
        let t = Scalar::t(N);
        let pt = [t.clone(), t.clone()];
        let rho = [int(-1), int(-1)];
        let x1 = mono(&a2, &[1, 0], one(), Domain::Polydisc);
        let x2 = mono(&a2, &[0, 1], one(), Domain::Polydisc);
        let p = &x1 * &x2;
        // oracle: (t1 + t)(t2 + t) = t1 t2 + t t1 + t t2 + t^2, weights all -2
        assert_eq!(shifted_eval_polydisc(&p, &pt, &rho).unwrap(), LogNorm::Finite(int(-2)));
        let sum = &shifted_eval_polydisc(&x1, &pt, &rho).unwrap()
            + &shifted_eval_polydisc(&x2, &pt, &rho).unwrap();
        assert_eq!(sum, LogNorm::Finite(int(-2)));
    }

    #[test]
    fn invalid_points_are_rejected() {
        assert!(SpectrumPoint::shifted_polydisc(vec![one()], vec![int(-1)], None).is_err());
        assert!(SpectrumPoint::shifted_polydisc(vec![Scalar::t(N)], vec![int(-1)], Some(vec![int(-1)]))
            .is_err());
        assert!(SpectrumPoint::shifted_torus(vec![Scalar::t(N)], vec![int(-1)], 4).is_err());
        assert!(SpectrumPoint::shifted_torus(vec![Scalar::t(N)], vec![int(0)], 0).is_err());
    }

    #[test]
    fn q_far_from_one_is_rejected() {
        let a1 = Algebra::new(TwistForm::ordered(1), Scalar::from_int(2, N)).unwrap();
        let x = a1.generator(0, Domain::Polydisc);
        assert!(shifted_eval_polydisc(&x, &[Scalar::t(N)], &[int(0)]).is_err());
    }

    #[test]
    fn torus_inverse_generator() {
        let a1 = alg(1);
        let f = mono(&a1, &[-1], one(), Domain::Torus);
        let ev = shifted_eval_torus(&f, &[Scalar::t(N)], &[rat(-1, 2)], 8).unwrap();
        assert_eq!(ev.value, LogNorm::Finite(rat(1, 2)));
        assert!(ev.certified);
        assert_eq!(ev.tail_bound, LogNorm::Finite(int(-4)));
    }

    #[test]
    fn torus_unit() {
        let a2 = alg(2);
        let ev = shifted_eval_torus(&a2.one(Domain::Torus), &[Scalar::t(N), Scalar::zero(N)], &[int(0), int(5)], 3)
            .unwrap();
        assert_eq!(ev.value, LogNorm::zero());
        assert!(ev.certified);
    }

    #[test]
    fn torus_value_matches_gauss_norm_when_shift_is_small() {
        let a2 = alg(2);
        let t = Scalar::t(N);
        let f = &(&mono(&a2, &[-2, 1], one(), Domain::Torus) + &mono(&a2, &[1, -1], t.clone(), Domain::Torus))
            - &mono(&a2, &[0, 3], Scalar::from_int(5, N), Domain::Torus);
        let rho = [rat(-1, 2), rat(1, 3)];
        let ev = shifted_eval_torus(&f, &[t.clone(), t.clone()], &rho, 6).unwrap();
        assert!(ev.certified);
        assert_eq!(ev.value, f.gauss_norm(&rho).unwrap());
    }

    #[test]
    fn uncertified_value_is_an_error() {
        let bad = Evaluation {
            value: LogNorm::Finite(int(-3)),
            tail_bound: LogNorm::Finite(int(-2)),
            certified: false,
        };
        assert!(matches!(bad.certified_value(), Err(Error::Uncertified(_))));
    }

    #[test]
    fn skeleton_roundtrip() {
        let a2 = alg(2);
        let p = skeleton_embed(vec![int(1), int(-2)]);
        assert_eq!(skeleton_retract(&p, &a2).unwrap(), vec![int(1), int(-2)]);
        let sp = SpectrumPoint::shifted_polydisc(vec![Scalar::t(N), Scalar::zero(N)], vec![int(-1), rat(3, 2)], None)
            .unwrap();
        assert_eq!(skeleton_retract(&sp, &a2).unwrap(), vec![int(-1), rat(3, 2)]);
        let origin = skeleton_embed(vec![int(0), int(0)]);
        for e in [[3, -1], [0, 0], [-5, 2]] {
            let m = mono(&a2, &e, one(), Domain::Torus);
            assert_eq!(origin.evaluate(&m).unwrap().value, LogNorm::zero());
        }
    }

    #[test]
    fn submultiplicative_examples() {
        let a2 = alg(2);
        let samples = vec![
            &a2.one(Domain::Polydisc) + &a2.generator(0, Domain::Polydisc),
            mono(&a2, &[2, 1], Scalar::t(N), Domain::Polydisc),
            &a2.generator(1, Domain::Polydisc) - &mono(&a2, &[1, 1], one(), Domain::Polydisc),
        ];
        let one_el = a2.one(Domain::Polydisc);
        let zero_rho = [int(0), int(0)];
        let gauss = |f: &Element| f.gauss_norm(&zero_rho);
        let r = check_submultiplicative_bounded(gauss, gauss, &int(0), &one_el, &samples).unwrap();
        assert!(r.passed());
        let zero_map = |_: &Element| Ok(LogNorm::Bottom);
        let r = check_submultiplicative_bounded(zero_map, gauss, &int(0), &one_el, &samples).unwrap();
        assert!(!r.unit_ok);
        let pt = [Scalar::t(N), Scalar::t(N)];
        let rho = [int(-1), rat(-1, 2)];
        let ambient_r = [int(0), int(1)];
        let shifted = |f: &Element| shifted_eval_polydisc(f, &pt, &rho);
        let ambient = |f: &Element| f.gauss_norm(&ambient_r);
        let r = check_submultiplicative_bounded(shifted, ambient, &int(0), &one_el, &samples).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn point_json_roundtrip() {
        let p = SpectrumPoint::shifted_torus(vec![Scalar::t(N)], vec![rat(-1, 2)], 8).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""kind":"shifted_torus""#));
        assert!(s.contains(r#""rho":["-1/2"]"#));
        let back: SpectrumPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
