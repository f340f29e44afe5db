#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use qtate::field::{int, rat, Rational};
use qtate::qalg::{Domain, TwistForm};
use qtate::{Algebra, Element, Scalar};

pub const N: i64 = 16;

pub fn q_one_plus_t() -> Scalar {
    Scalar::from_terms([(0, int(1)), (1, int(1))], N)
}

pub fn ordered_algebra(d: usize) -> Arc<Algebra> {
    ordered_algebra_at(d, N)
}

pub fn ordered_algebra_at(d: usize, precision: i64) -> Arc<Algebra> {
    Algebra::new(TwistForm::ordered(d), Scalar::from_terms([(0, int(1)), (1, int(1))], precision)).unwrap()
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn point(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rational(), d)
}

/// Nonzero scalar with a few terms starting at valuation `lo..=hi`.
pub fn scalar(lo: i64, hi: i64) -> impl Strategy<Value = Scalar> {
    scalar_at(lo, hi, N)
}

pub fn scalar_at(lo: i64, hi: i64, precision: i64) -> impl Strategy<Value = Scalar> {
    (lo..=hi, proptest::collection::vec(-3i64..=3, 1..=3), 1i64..=3).prop_map(move |(v, cs, lead)| {
        let mut terms = vec![(v, int(lead))];
        for (k, c) in cs.into_iter().enumerate() {
            terms.push((v + 1 + k as i64, int(c)));
        }
        Scalar::from_terms(terms, precision)
    })
}

pub fn terms(d: usize, lo: i64, hi: i64, max_len: usize) -> impl Strategy<Value = Vec<(Vec<i64>, Scalar)>> {
    terms_at(d, lo, hi, max_len, N)
}

pub fn terms_at(
    d: usize,
    lo: i64,
    hi: i64,
    max_len: usize,
    precision: i64,
) -> impl Strategy<Value = Vec<(Vec<i64>, Scalar)>> {
    proptest::collection::vec((proptest::collection::vec(lo..=hi, d), scalar_at(-2, 3, precision)), 1..=max_len)
}

pub fn torus_element(alg: Arc<Algebra>, max_len: usize) -> impl Strategy<Value = Element> {
    let d = alg.dim();
    let p = alg.precision();
    terms_at(d, -3, 3, max_len, p).prop_map(move |t| alg.element(t, Domain::Torus, None).unwrap())
}

pub fn polydisc_element(alg: Arc<Algebra>, max_deg: i64, max_len: usize) -> impl Strategy<Value = Element> {
    let d = alg.dim();
    let p = alg.precision();
    terms_at(d, 0, max_deg, max_len, p).prop_map(move |t| alg.element(t, Domain::Polydisc, None).unwrap())
}

/// Random `SL(2, Z)` matrix as a product of elementary generators.
pub fn sl2() -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec((0usize..3, -1i64..=1), 0..=3).prop_map(|steps| {
        let mut m = vec![vec![1i64, 0], vec![0, 1]];
        for (kind, k) in steps {
            let g = match kind {
                0 => vec![vec![1, k], vec![0, 1]],
                1 => vec![vec![1, 0], vec![k, 1]],
                _ => vec![vec![0, -1], vec![1, 0]],
            };
            m = (0..2).map(|i| (0..2).map(|j| (0..2).map(|l| m[i][l] * g[l][j]).sum()).collect()).collect();
        }
        m
    })
}
