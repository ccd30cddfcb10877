mod common;

use common::{any_form, form, nonzero_form, small_point};
use pcflab_core::poly::{HomPoly, DEFAULT_LINEAR_HEIGHT};
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(500)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn distributivity(
        (a, b, c) in (1u32..=3, 0u32..=2).prop_flat_map(|(d, e)| {
            (form(3, d, 4), form(3, d, 4), form(3, e, 4))
        })
    ) {
        let lhs = a.add(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.mul(&c).unwrap(), c.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn multiplication_is_associative(
        a in any_form(3, 0, 2, 3),
        b in any_form(3, 0, 2, 3),
        c in any_form(3, 0, 2, 3),
    ) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn compose_degree_and_values(
        p in any_form(3, 1, 3, 4),
        e in 1u32..=2,
        seed in any::<u64>(),
        pt in small_point(3),
    ) {
        let subs: Vec<HomPoly> = (0..3)
            .map(|i| {
                let a = HomPoly::var(3, i).pow(e);
                let b = HomPoly::var(3, ((seed >> (2 * i)) as usize) % 3).pow(e);
                a.add(&b.scale(&common::q(((seed >> (8 + i)) % 5) as i64 - 2))).unwrap()
            })
            .collect();
        let c = p.compose(&subs).unwrap();
        prop_assert_eq!(c.degree(), p.degree() * e);
        let inner: Vec<_> = subs.iter().map(|s| s.eval(&pt)).collect();
        prop_assert_eq!(c.eval(&pt), p.eval(&inner));
    }

    #[test]
    fn exact_divide_recovers_factor(a in any_form(3, 0, 3, 4), b in any_form(3, 0, 2, 4)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.exact_divide(&b).unwrap(), Some(a));
    }

    #[test]
    fn gcd_of_multiples(
        a in any_form(3, 0, 2, 3),
        b in any_form(3, 0, 2, 3),
        g in any_form(3, 0, 2, 3),
    ) {
        let lhs = a.mul(&g).unwrap().gcd(&b.mul(&g).unwrap()).unwrap();
        let rhs = g.mul(&a.gcd(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs.normalized(), rhs.normalized());
        let ag = a.mul(&g).unwrap();
        prop_assert!(ag.exact_divide(&lhs).unwrap().is_some());
    }

    #[test]
    fn squarefree_absorbs_squares(p in any_form(3, 1, 2, 3), r in any_form(3, 0, 2, 3)) {
        let p2q = p.pow(2).mul(&r).unwrap();
        let pq = p.mul(&r).unwrap();
        prop_assert_eq!(p2q.squarefree_part().unwrap(), pq.squarefree_part().unwrap());
        let s = pq.squarefree_part().unwrap();
        prop_assert_eq!(s.squarefree_part().unwrap(), s.clone());
        prop_assert!(s.is_normalized());
    }

    #[test]
    fn resultant_vanishes_exactly_on_common_factors(
        a in any_form(3, 1, 2, 3),
        b in any_form(3, 1, 2, 3),
        c in nonzero_form(3, 1, 3),
        share in any::<bool>(),
        i in 0usize..3,
    ) {
        let (a, b) = if share {
            (a.mul(&c).unwrap(), b.mul(&c).unwrap())
        } else {
            (a, b)
        };
        let da = a.as_mpoly().degree_in(i).unwrap_or(0);
        let db = b.as_mpoly().degree_in(i).unwrap_or(0);
        prop_assume!(da > 0 && db > 0);
        let r = a.resultant_wrt(&b, i).unwrap();
        let g = a.gcd(&b).unwrap();
        let common = g.as_mpoly().degree_in(i).unwrap_or(0) > 0;
        prop_assert_eq!(r.is_zero(), common);
    }

    #[test]
    fn linear_factors_reassemble(
        ls in prop::collection::vec(nonzero_form(3, 1, 3), 0..=3),
        rest in any_form(3, 0, 2, 4),
    ) {
        let mut f = rest;
        for l in &ls {
            f = f.mul(l).unwrap();
        }
        let lf = f.linear_factors(DEFAULT_LINEAR_HEIGHT, &[]).unwrap();
        for (l, m) in &lf.factors {
            prop_assert!(f.exact_divide(&l.pow(*m)).unwrap().is_some());
        }
        prop_assert_eq!(lf.product().normalized(), f.normalized());
    }
}
