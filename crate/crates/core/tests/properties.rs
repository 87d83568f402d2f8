use canonloop::enumerate::{classify_diagram, enumerate_structures, project_shape};
use canonloop::loopgf::{loop_gf, GfRequest, LoopKind};
use canonloop::series::compose;
use canonloop::{BSeries, ExactRational, UPoly, USeries};
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

fn small_rational() -> impl Strategy<Value = ExactRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn useries(order: usize) -> impl Strategy<Value = USeries> {
    prop::collection::vec(small_rational(), order + 1).prop_map(move |c| USeries::from_coeffs(order, c))
}

/// Bivariate series of order 5 whose coefficients stay within a `u`-degree
/// that keeps products under the cap.
fn bseries() -> impl Strategy<Value = BSeries> {
    prop::collection::vec(prop::collection::vec(small_rational(), 0..=2), 6).prop_map(|rows| {
        let coeffs = rows.into_iter().map(UPoly::from_coeffs).collect();
        BSeries::from_coeffs(5, 6, coeffs).unwrap()
    })
}

proptest! {
    #[test]
    fn useries_ring_laws(a in useries(6), b in useries(6), c in useries(6)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()), a.mul(&b).add(&a.mul(&c)).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a);
    }

    #[test]
    fn bseries_ring_laws(a in bseries(), b in bseries(), c in bseries()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reciprocal_is_an_inverse(a in useries(7), c0 in small_rational()) {
        prop_assume!(c0 != q(0, 1));
        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] = c0;
        let a = USeries::from_coeffs(7, coeffs);
        prop_assert_eq!(a.mul(&a.recip().unwrap()), USeries::one(7));
    }

    #[test]
    fn specialization_is_a_ring_map(a in bseries(), b in bseries(), u in small_rational()) {
        let lhs = a.mul(&b).unwrap().specialize(&u);
        let rhs = a.specialize(&u).mul(&b.specialize(&u));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_rule(a in useries(6), b in useries(6)) {
        let lhs = a.mul(&b).diff();
        let rhs = a.diff().mul(&b.truncate(5)).add(&a.truncate(5).mul(&b.diff())).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_with_z_is_identity(a in useries(6)) {
        let z = USeries::monomial(q(1, 1), 1, 6);
        prop_assert_eq!(compose(&a, &z).unwrap(), a);
    }

    #[test]
    fn composition_is_a_ring_map(a in useries(6), b in useries(6), inner in useries(6)) {
        let mut c = inner.coeffs().to_vec();
        c[0] = q(0, 1);
        let inner = USeries::from_coeffs(6, c);
        let lhs = compose(&a.mul(&b), &inner).unwrap();
        let rhs = compose(&a, &inner).unwrap().mul(&compose(&b, &inner).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn structure_invariants(k in 2usize..=4, tau in 1usize..=3, n in 0usize..=10) {
        for s in enumerate_structures(k, tau, n).unwrap() {
            let d = &s.diagram;
            prop_assert!(d.crossing_number() < k);
            prop_assert!(d.min_stack_at_least(tau));
            prop_assert!(!d.has_one_arc());
            let p = classify_diagram(d);
            let shape = project_shape(&s);
            prop_assert_eq!(p.hairpins, shape.one_arcs());
            prop_assert!(shape.is_stack_free());
            prop_assert!(p.stacks >= p.stems);
            prop_assert_eq!(p.stems, p.stacks - p.interiors - p.bulges);
            if !d.arcs.is_empty() && k == 2 {
                prop_assert!(p.hairpins >= 1);
            }
            let r = classify_diagram(&d.reflect());
            prop_assert_eq!((r.hairpins, r.interiors, r.bulges, r.stacks, r.stems),
                (p.hairpins, p.interiors, p.bulges, p.stacks, p.stems));
        }
    }

    #[test]
    fn loop_coefficients_are_counts(k in 2usize..=5, tau in 1usize..=3, kind_ix in 0usize..3) {
        let kind = LoopKind::ALL[kind_ix];
        let gf = loop_gf(&GfRequest::new(kind, k, tau, 12)).unwrap();
        for p in gf.coeffs() {
            prop_assert!(p.coeffs().iter().all(|c| c.is_integer() && *c >= q(0, 1)));
        }
    }
}
