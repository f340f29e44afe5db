use std::collections::BTreeMap;

use proptest::prelude::*;
use qtate::field::{int, rat};
use qtate::k3model::{
    compatibility_sweep, convention_search, embed_j, glue_automorphism_check, identification_check, map_f, project_pi,
    select_conventions, standard_charts, verify_chart_homomorphism, ChartModel, Conventions, KThreePresentation,
    Orientation, Overlap,
};
use qtate::spectra::SpectrumPoint;
use qtate::{Rational, Scalar};

fn one_plus_t() -> Scalar {
    Scalar::from_terms([(0, int(1)), (1, int(1))], 16)
}

/// Laurent polynomial in `q` with integer coefficients.
type QPoly = BTreeMap<i64, i64>;
/// Normal-ordered `sum c_{ab} xi^a eta^b`.
type Normal = BTreeMap<(i64, i64), QPoly>;

fn add_into(out: &mut Normal, key: (i64, i64), shift: i64, c: &QPoly) {
    let slot = out.entry(key).or_default();
    for (k, v) in c {
        *slot.entry(k + shift).or_default() += v;
    }
    slot.retain(|_, v| *v != 0);
    if slot.is_empty() {
        out.remove(&key);
    }
}

/// `(xi^a eta^b)(xi^c eta^d) = q^{s b c} xi^{a+c} eta^{b+d}`, `s = -1` when
/// `xi eta = q eta xi` and `s = 1` when `eta xi = q xi eta`.
fn mul(x: &Normal, y: &Normal, s: i64) -> Normal {
    let mut out = Normal::new();
    for (&(a, b), cx) in x {
        for (&(c, d), cy) in y {
            let mut prod = QPoly::new();
            for (i, u) in cx {
                for (j, v) in cy {
                    *prod.entry(i + j).or_default() += u * v;
                }
            }
            add_into(&mut out, (a + c, b + d), s * b * c, &prod);
        }
    }
    out
}

fn sum(terms: &[(Normal, QPoly)]) -> Normal {
    let mut out = Normal::new();
    for (x, c) in terms {
        for (k, v) in &mul(x, &[((0, 0), c.clone())].into(), 0) {
            add_into(&mut out, *k, 0, v);
        }
    }
    out
}

fn mono(a: i64, b: i64) -> Normal {
    [((a, b), [(0, 1)].into())].into()
}

fn cst(pairs: &[(i64, i64)]) -> QPoly {
    pairs.iter().copied().collect()
}

/// The chart images written by hand in normal order.
fn oracle_images(chart: u8, s: i64) -> [Normal; 3] {
    let one_eta = sum(&[(mono(0, 0), cst(&[(0, 1)])), (mono(0, 1), cst(&[(0, 1)]))]);
    let xi_inv = mono(-1, 0);
    // (xi eta)^{-1} = eta^{-1} xi^{-1}
    let xe_inv = mul(&mono(0, -1), &mono(-1, 0), s);
    match chart {
        1 => [xi_inv, mul(&mono(1, 0), &one_eta, s), mono(0, -1)],
        2 => [mul(&one_eta, &xi_inv, s), mono(1, 0), mono(0, -1)],
        _ => [mul(&one_eta, &xe_inv, s), mul(&mono(1, 0), &mono(0, 1), s), mono(0, -1)],
    }
}

fn oracle_residuals_vanish(conv: Conventions, chart: u8) -> bool {
    let s = match conv.xi_eta {
        Orientation::Forward => -1,
        Orientation::Backward => 1,
    };
    let [a, b, g] = oracle_images(chart, s);
    let mq = cst(&[(1, -1)]);
    let one = cst(&[(0, 1)]);
    let comm = |o: Orientation, x: &Normal, y: &Normal| match o {
        Orientation::Forward => sum(&[(mul(x, y, s), one.clone()), (mul(y, x, s), mq.clone())]),
        Orientation::Backward => sum(&[(mul(y, x, s), one.clone()), (mul(x, y, s), mq.clone())]),
    };
    let r1 = comm(conv.alpha_gamma, &a, &g);
    let r2 = comm(conv.beta_gamma, &b, &g);
    let r3 = sum(&[(mul(&b, &a, s), one.clone()), (mul(&a, &b, s), mq.clone()), (mono(0, 0), cst(&[(0, -1), (1, 1)]))]);
    let r4 = sum(&[(mul(&mul(&a, &b, s), &g, s), one.clone()), (g.clone(), cst(&[(0, -1)])), (mono(0, 0), cst(&[(0, -1)]))]);
    [r1, r2, r3, r4].iter().all(|r| r.is_empty())
}

#[test]
fn convention_search_matches_oracle() {
    let found = convention_search(&one_plus_t()).unwrap();
    assert_eq!(found.len(), 8);
    for (conv, ok) in &found {
        let oracle = (1..=3).all(|c| oracle_residuals_vanish(*conv, c));
        assert_eq!(*ok, oracle, "{conv}");
    }
    assert_eq!(found.iter().filter(|(_, ok)| *ok).count(), 1);
    assert_eq!(select_conventions(&one_plus_t()).unwrap(), Conventions::SELECTED);
    let other_q = Scalar::from_terms([(0, int(1)), (1, int(2)), (3, int(-1))], 16);
    assert_eq!(select_conventions(&other_q).unwrap(), Conventions::SELECTED);
}

#[test]
fn residuals_vanish_in_all_charts() {
    let pres = KThreePresentation::standard(16).unwrap();
    for chart in standard_charts(&pres).unwrap() {
        for order in [None, Some(8)] {
            let r = verify_chart_homomorphism(&chart, &pres, order).unwrap();
            assert_eq!(r.len(), 4);
            assert!(r.iter().all(|x| x.is_zero()), "chart {}", chart.index);
        }
    }
}

#[test]
fn commutative_specialization() {
    let pres = KThreePresentation::standard(16).unwrap().at_t_zero().unwrap();
    assert!(pres.q.is_one());
    for chart in standard_charts(&pres).unwrap() {
        assert!(verify_chart_homomorphism(&chart, &pres, None).unwrap().iter().all(|x| x.is_zero()));
    }
    assert!(select_conventions(&pres.q).is_err());
    assert!(convention_search(&pres.q).unwrap().iter().all(|(_, ok)| *ok));
}

#[test]
fn map_f_more_examples() {
    let pres = KThreePresentation::standard(16).unwrap();
    let c1 = ChartModel::new(1, &pres).unwrap();
    let c3 = ChartModel::new(3, &pres).unwrap();
    let p = |x: i64, y: i64| SpectrumPoint::monomial(vec![int(x), int(y)]);
    assert_eq!(map_f(&c1, &p(1, 3)).unwrap(), [int(0), int(4), int(-3)]);
    assert_eq!(map_f(&c3, &p(1, 2)).unwrap(), [int(0), int(3), int(-2)]);
    let shifted = SpectrumPoint::shifted_polydisc(vec![Scalar::t(16), Scalar::t(16)], vec![int(0), int(0)], None).unwrap();
    assert!(map_f(&c1, &shifted).is_err());
}

#[test]
fn sweeps_cover_all_branches() {
    let pres = KThreePresentation::standard(16).unwrap();
    for chart in standard_charts(&pres).unwrap() {
        let points = chart.region.grid(10);
        assert!(points.len() >= 100, "chart {} has {} points", chart.index, points.len());
        let report = compatibility_sweep(&chart, &points).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        match chart.index {
            1 => assert!(report.j_branches[0] > 0 && report.j_branches[2] > 0),
            2 => assert!(report.pi_branches[0] > 0 && report.pi_branches[1] > 0),
            _ => assert_eq!(report.j_branches[2], report.points),
        }
    }
}

#[test]
fn sweep_rejects_points_outside_domain() {
    let pres = KThreePresentation::standard(16).unwrap();
    let c3 = ChartModel::new(3, &pres).unwrap();
    assert!(compatibility_sweep(&c3, &[vec![int(-1), int(1)]]).is_err());
}

#[test]
fn gluing_checks_pass() {
    let pres = KThreePresentation::standard(16).unwrap();
    for overlap in [Overlap::U1U2, Overlap::U1U3] {
        let report = glue_automorphism_check(&pres, overlap, 6, 8).unwrap();
        assert!(report.commutation_exact && report.inverse_ok && report.charts_agree);
        assert!(report.units_certified(), "{overlap:?}");
        assert!(report.passed());
        assert!(report.samples.len() >= 5);
    }
    let id = identification_check(&pres).unwrap();
    assert!(id.roundtrip && id.matches_charts);
}

#[test]
fn unit_sample_at_depth_one() {
    let pres = KThreePresentation::standard(16).unwrap();
    let report = glue_automorphism_check(&pres, Overlap::U1U2, 4, 8).unwrap();
    let s = report.samples.iter().find(|s| s.point == vec![rat(1, 2), int(-3)]).unwrap();
    assert_eq!(s.small, qtate::LogNorm::Finite(int(-3)));
    assert_eq!(s.unit, qtate::LogNorm::zero());
    assert_eq!(s.inverse_defect, qtate::LogNorm::Finite(int(-15)));
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

/// `f` by hand from the ultrametric max rule for each chart.
fn oracle_f(chart: u8, x: &Rational, y: &Rational) -> [Rational; 3] {
    let z = int(0);
    let max = |a: Rational, b: Rational| if a > b { a } else { b };
    match chart {
        1 => [max(z.clone(), -x), max(z, max(x.clone(), x + y)), -y],
        2 => [max(z.clone(), max(-x, y - x)), max(z, x.clone()), -y],
        _ => [max(z.clone(), max(-x - y, -x)), max(z, x + y), -y],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn j_inverts_on_its_image(x in rational(), y in rational()) {
        let v = embed_j(&x, &y);
        prop_assert_eq!(project_pi(&v).unwrap(), [x, y]);
    }

    #[test]
    fn j_is_injective(a in rational(), b in rational(), c in rational(), d in rational()) {
        prop_assume!((a.clone(), b.clone()) != (c.clone(), d.clone()));
        prop_assert_ne!(embed_j(&a, &b), embed_j(&c, &d));
    }

    #[test]
    fn j_seam_is_continuous(y in rational()) {
        let z = int(0);
        let expected = [z.clone(), y.clone().max(z.clone()), -&y];
        prop_assert_eq!(embed_j(&z, &y), expected);
    }

    #[test]
    fn map_f_matches_hand_formulas(chart in 1u8..=3, x in rational(), y in rational()) {
        let pres = KThreePresentation::standard(16).unwrap();
        let c = ChartModel::new(chart, &pres).unwrap();
        let pt = vec![x.clone(), y.clone()];
        prop_assume!(c.region.contains(&pt));
        let f = map_f(&c, &SpectrumPoint::monomial(pt.clone())).unwrap();
        prop_assert_eq!(&f, &oracle_f(chart, &x, &y));
        let p = c.projection(&pt).unwrap();
        prop_assert_eq!(embed_j(&p[0], &p[1]), f);
    }
}
