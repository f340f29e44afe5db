mod common;

use common::*;
use proptest::prelude::*;
use qtate::field::{int, rat, Rational};
use qtate::qalg::Domain;
use qtate::spectra::{check_point_multiplicative, shifted_eval_polydisc, shifted_eval_torus, SpectrumPoint};
use qtate::{Algebra, Element, Free, LogNorm, Scalar};
use std::sync::Arc;

const P: i64 = 40;

/// `max_l (log|a_l| + l.rho)` straight from the terms.
fn naive_gauss(f: &Element, rho: &[Rational]) -> LogNorm {
    f.terms()
        .map(|(e, c)| {
            let w = e.iter().zip(rho).fold(int(0), |acc, (&k, r)| acc + r * int(k));
            c.lognorm().shift(&w)
        })
        .max()
        .unwrap_or(LogNorm::Bottom)
}

fn twisted_pair(max_d: usize) -> impl Strategy<Value = (Element, Element, Vec<Rational>)> {
    (1..=max_d).prop_flat_map(|d| {
        let alg = ordered_algebra(d);
        (polydisc_element(alg.clone(), 5, 4), polydisc_element(alg, 5, 4), point(d))
    })
}

fn free_pair() -> impl Strategy<Value = (Free, Free, Vec<Rational>)> {
    (1usize..=3).prop_flat_map(|n| {
        let free = move || {
            let word = proptest::collection::vec(0..n as u32, 0..=5);
            proptest::collection::vec((word, scalar(-2, 3)), 1..=4).prop_map(move |t| Free::from_terms(n, t).unwrap())
        };
        (free(), free(), point(n))
    })
}

/// A log-radius and a shift with `log|a| <= rho` (or `< rho` when `strict`).
fn shift(strict: bool) -> impl Strategy<Value = (Scalar, Rational)> {
    ((-4i64..=4), (1i64..=2), 0i64..=2, -3i64..=3, any::<bool>()).prop_map(move |(n, d, extra, c, zero)| {
        let rho = rat(n, d);
        if zero {
            return (Scalar::zero(P), rho);
        }
        // -v <= rho  <=>  v >= ceil(-rho)
        let mut v: i64 = (-&rho).ceil().to_integer().try_into().unwrap();
        if strict && rat(-v, 1) == rho {
            v += 1;
        }
        (Scalar::from_terms([(v + extra, int(1)), (v + extra + 1, int(c))], P), rho)
    })
}

fn shifted_point(d: usize, strict: bool) -> impl Strategy<Value = (Vec<Scalar>, Vec<Rational>)> {
    proptest::collection::vec(shift(strict), d).prop_map(|v| v.into_iter().unzip())
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// One variable: `b_k = sum_n c_n C(n, k) a^(n-k)` and `nu = max lognorm(b_k) + k rho`.
fn one_variable_oracle(f: &Element, a: &Scalar, rho: &Rational) -> LogNorm {
    let top = f.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    (0..=top)
        .map(|k| {
            let mut b = Scalar::zero(P);
            for (e, c) in f.terms() {
                let n = e[0];
                if n >= k {
                    let mut ak = Scalar::from_int(binomial(n, k), P);
                    for _ in 0..n - k {
                        ak = &ak * a;
                    }
                    b = &b + &(&ak * c);
                }
            }
            b.lognorm().shift(&(rho * int(k)))
        })
        .max()
        .unwrap()
}

fn algebra(d: usize) -> Arc<Algebra> {
    ordered_algebra_at(d, P)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gauss_norm_is_multiplicative((f, g, rho) in twisted_pair(3)) {
        let fg = f.try_mul(&g).unwrap();
        prop_assert_eq!(f.gauss_norm(&rho).unwrap(), naive_gauss(&f, &rho));
        prop_assert_eq!(fg.gauss_norm(&rho).unwrap(), &naive_gauss(&f, &rho) + &naive_gauss(&g, &rho));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn free_gauss_norm_is_multiplicative((f, g, r) in free_pair()) {
        let fg = f.try_mul(&g).unwrap();
        prop_assert_eq!(fg.gauss_norm(&r).unwrap(), &f.gauss_norm(&r).unwrap() + &g.gauss_norm(&r).unwrap());
    }

    #[test]
    fn shifted_polydisc_is_multiplicative(
        (f, g, a, rho) in (1usize..=3).prop_flat_map(|d| {
            (polydisc_element(algebra(d), 5, 3), polydisc_element(algebra(d), 5, 3), shifted_point(d, false))
                .prop_map(|(f, g, (a, rho))| (f, g, a, rho))
        })
    ) {
        let radius: Vec<Rational> = rho.iter().map(|r| r + int(1)).collect();
        let pt = SpectrumPoint::shifted_polydisc(a, rho, Some(radius)).unwrap();
        let report = check_point_multiplicative(&pt, &[(f, g)]).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn shifted_polydisc_matches_binomial_oracle(
        f in polydisc_element(algebra(1), 5, 4),
        (a, rho) in shift(false),
    ) {
        let got = shifted_eval_polydisc(&f, &[a.clone()], &[rho.clone()]).unwrap();
        prop_assert_eq!(got, one_variable_oracle(&f, &a, &rho));
    }

    #[test]
    fn shifted_polydisc_is_bounded_by_ambient(
        f in polydisc_element(algebra(2), 4, 3),
        (a, rho) in shifted_point(2, false),
    ) {
        let v = shifted_eval_polydisc(&f, &a, &rho).unwrap();
        let ambient = f.gauss_norm(&rho.iter().map(|r| r + int(1)).collect::<Vec<_>>()).unwrap();
        prop_assert!(v <= ambient);
    }

    #[test]
    fn shifts_beyond_the_radius_are_rejected((a, _) in shift(false)) {
        prop_assume!(!a.is_zero());
        let LogNorm::Finite(la) = a.lognorm() else { unreachable!() };
        let low = la - rat(1, 2);
        prop_assert!(SpectrumPoint::shifted_polydisc(vec![a.clone()], vec![low.clone()], None).is_err());
        let one = algebra(1).one(Domain::Polydisc);
        prop_assert!(shifted_eval_polydisc(&one, &[a], &[low]).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shifted_torus_is_multiplicative_and_stable(
        f in torus_element(algebra(2), 3),
        g in torus_element(algebra(2), 3),
        (a, rho) in shifted_point(2, true),
    ) {
        let m = 10;
        let fg = f.try_mul(&g).unwrap();
        let eval = |h: &Element, m: u32| shifted_eval_torus(h, &a, &rho, m).unwrap();
        let (vf, vg, vfg) = (eval(&f, m), eval(&g, m), eval(&fg, m));
        prop_assert!(vf.certified && vg.certified && vfg.certified);
        prop_assert_eq!(vfg.value.clone(), &vf.value + &vg.value);
        for (h, v) in [(&f, &vf), (&g, &vg), (&fg, &vfg)] {
            let doubled = eval(h, 2 * m);
            prop_assert!(doubled.certified);
            prop_assert_eq!(&doubled.value, &v.value);
            prop_assert!(doubled.tail_bound <= v.tail_bound);
            // a strictly smaller shift gives the monomial point itself
            prop_assert_eq!(&v.value, &naive_gauss(h, &rho));
        }
    }
}
