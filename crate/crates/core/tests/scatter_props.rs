mod common;

use std::sync::Arc;

use proptest::prelude::*;
use qtate::field::int;
use qtate::qalg::{Domain, TwistForm};
use qtate::scatter::{factorize, standard_input, AngleRegion, Cone, Slope, WallAutomorphism};
use qtate::{Algebra, Scalar};

const P: i64 = 32;

fn quantum(p: i64) -> Arc<Algebra> {
    Algebra::new(TwistForm::ordered(2), Scalar::from_terms([(0, int(1)), (1, int(1))], p)).unwrap()
}

fn classical() -> Arc<Algebra> {
    Algebra::new(TwistForm::ordered(2), Scalar::one(P)).unwrap()
}

/// Every coefficient keeps at least `margin` known digits past its leading term.
fn precise(aut: &WallAutomorphism, margin: i64) -> bool {
    aut.corrections().all(|(_, c)| c.precision() - c.valuation().unwrap() >= margin)
}

#[test]
fn quantum_factorization_recomposes() {
    let alg = quantum(P);
    let (g0, ginf) = standard_input(&alg, 6).unwrap();
    let f = factorize(&g0, &ginf).unwrap();
    let id = WallAutomorphism::identity(&alg, Cone::standard(6)).unwrap();
    assert_eq!(f.ordered_product(&id).unwrap().first_difference(&ginf.product(&g0).unwrap()).unwrap(), None);
    assert!(f.slopes().contains(&Slope::new(1, 1).unwrap()));
    for (s, g) in &f.factors {
        assert_eq!(g.slope(), Some(*s));
        assert!(g.commutation_residual().unwrap().is_zero());
        assert!(precise(g, 8), "factor {s} lost precision");
    }
}

#[test]
fn refinement_keeps_low_orders() {
    for alg in [classical(), quantum(P)] {
        let (g0, ginf) = standard_input(&alg, 6).unwrap();
        let coarse = factorize(&g0, &ginf).unwrap();
        let (h0, hinf) = standard_input(&alg, 8).unwrap();
        let fine = factorize(&h0, &hinf).unwrap();
        for (s, g) in &coarse.factors {
            let refined = fine.factor(*s).expect("slope survives refinement").truncated(6).unwrap();
            assert_eq!(&refined, g, "slope {s}");
        }
        for (s, g) in &fine.factors {
            if coarse.factor(*s).is_none() {
                assert!(g.truncated(6).unwrap().is_identity(), "new slope {s} below order 7");
            }
        }
    }
}

#[test]
fn factors_respect_angle_bound() {
    let region = AngleRegion::new(vec![int(0), int(0)], [1, 0], [0, 1]).unwrap();
    let (g0, ginf) = standard_input(&classical(), 6).unwrap();
    assert!(region.admits(&g0).unwrap() && region.admits(&ginf).unwrap());
    for (_, g) in factorize(&g0, &ginf).unwrap().factors {
        assert!(region.admits(&g).unwrap());
    }
    let shifted = AngleRegion::new(vec![int(-1), int(-1)], [1, 0], [0, 1]).unwrap();
    assert!(!shifted.admits(&g0).unwrap());
}

#[test]
fn transport_decreases_corrections() {
    let alg = quantum(P);
    let (_, ginf) = standard_input(&alg, 5).unwrap();
    let moved = ginf.transport(&Scalar::t(P)).unwrap();
    for (e, c) in moved.corrections() {
        let before = ginf.factors().0.coeff(e);
        assert!(c.lognorm() < before.lognorm());
    }
    assert!(ginf.transport(&Scalar::one(P)).is_err());
}

fn ray_wall(alg: Arc<Algebra>, d: u32) -> impl Strategy<Value = WallAutomorphism> {
    let rays = prop_oneof![Just([1i64, 0]), Just([0, 1]), Just([1, 1]), Just([1, 2]), Just([2, 1])];
    (rays, proptest::collection::vec(-2i64..=2, 1..=3)).prop_map(move |(alpha, cs)| {
        let p = alg.precision();
        let terms = cs
            .iter()
            .enumerate()
            .map(|(j, c)| (vec![-(j as i64 + 1) * alpha[0], -(j as i64 + 1) * alpha[1]], Scalar::from_int(*c, p)));
        let f = alg.element(terms, Domain::Torus, None).unwrap();
        WallAutomorphism::wall(&alg, Cone::standard(d), alpha, &f).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walls_preserve_commutation(w in ray_wall(quantum(P), 5)) {
        prop_assert!(w.commutation_residual().unwrap().is_zero());
    }

    #[test]
    fn composition_is_associative(a in ray_wall(quantum(P), 4), b in ray_wall(quantum(P), 4), c in ray_wall(quantum(P), 4)) {
        let l = a.compose(&b).unwrap().compose(&c).unwrap();
        let r = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn double_inversion(a in ray_wall(quantum(P), 5), b in ray_wall(quantum(P), 5)) {
        let g = a.product(&b).unwrap();
        let inv = g.invert().unwrap();
        prop_assert!(g.product(&inv).unwrap().is_identity());
        prop_assert_eq!(inv.invert().unwrap(), g);
    }

    #[test]
    fn composition_preserves_commutation(a in ray_wall(quantum(P), 5), b in ray_wall(quantum(P), 5)) {
        prop_assert!(a.compose(&b).unwrap().commutation_residual().unwrap().is_zero());
    }
}
