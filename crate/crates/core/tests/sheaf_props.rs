mod common;

use common::*;
use proptest::prelude::*;
use qtate::Algebra;
use std::sync::Arc;

const P: i64 = 40;

fn alg() -> Arc<Algebra> {
    ordered_algebra_at(2, P)
}
use qtate::sheaf::{
    converges_on, stalk_lognorm, transform_point, transform_polytope, transform_section, ActionConvention,
    Polytope, TransitionData,
};

fn conventions() -> impl Strategy<Value = ActionConvention> {
    prop_oneof![Just(ActionConvention::Direct), Just(ActionConvention::Inverse)]
}

fn transition() -> impl Strategy<Value = TransitionData> {
    (sl2(), proptest::collection::vec(scalar_at(-1, 1, P), 2)).prop_map(|(a, l)| TransitionData::new(a, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stalks_are_equivariant(
        g in transition(),
        f in torus_element(alg(), 5),
        x in point(2),
        conv in conventions(),
    ) {
        let tf = transform_section(&g, &f, conv).unwrap();
        let tx = transform_point(&g, &x, conv).unwrap();
        prop_assert_eq!(stalk_lognorm(&tf, &tx).unwrap(), stalk_lognorm(&f, &x).unwrap());
    }

    #[test]
    fn composition_matches_sequential_action(
        g1 in transition(),
        g2 in transition(),
        f in torus_element(alg(), 4),
        x in point(2),
        conv in conventions(),
    ) {
        let g = TransitionData::compose(&g1, &g2, conv).unwrap();
        let seq = transform_section(&g1, &transform_section(&g2, &f, conv).unwrap(), conv).unwrap();
        prop_assert_eq!(transform_section(&g, &f, conv).unwrap(), seq);
        let seq_x = transform_point(&g1, &transform_point(&g2, &x, conv).unwrap(), conv).unwrap();
        prop_assert_eq!(transform_point(&g, &x, conv).unwrap(), seq_x);
    }

    #[test]
    fn inverse_roundtrips(g in transition(), x in point(2), f in torus_element(alg(), 4), conv in conventions()) {
        let h = g.inverse(conv).unwrap();
        prop_assert_eq!(transform_point(&h, &transform_point(&g, &x, conv).unwrap(), conv).unwrap(), x.clone());
        prop_assert_eq!(transform_point(&g, &transform_point(&h, &x, conv).unwrap(), conv).unwrap(), x);
        let back = transform_section(&h, &transform_section(&g, &f, conv).unwrap(), conv).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn sections_transform_multiplicatively(
        g in transition(),
        f in torus_element(alg(), 4),
        h in torus_element(alg(), 4),
        conv in conventions(),
    ) {
        let lhs = transform_section(&g, &(&f * &h), conv).unwrap();
        let rhs = &transform_section(&g, &f, conv).unwrap() * &transform_section(&g, &h, conv).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn convergence_is_invariant(
        g in transition(),
        f in torus_element(alg(), 4),
        apex in point(2),
        rays in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 2), 0..=2),
        conv in conventions(),
    ) {
        let u = Polytope::cone(apex, rays).unwrap();
        let tu = transform_polytope(&g, &u, conv).unwrap();
        let tf = transform_section(&g, &f, conv).unwrap();
        prop_assert_eq!(converges_on(&f, &u).unwrap(), converges_on(&tf, &tu).unwrap());
    }
}
