use std::sync::{Arc, OnceLock};

use glpsh_core::context::Context;
use glpsh_core::graded::{m_plus, m_r, GradedRPlus};
use glpsh_core::rplus::{brauer_induction, MonomialSum, PairBasis};
use num_rational::Rational64;
use proptest::prelude::*;

fn ctx() -> &'static Context {
    static C: OnceLock<Context> = OnceLock::new();
    C.get_or_init(Context::default)
}

fn gl23() -> Arc<PairBasis> {
    ctx().basis(3, &[2]).unwrap()
}

fn be(b: &Arc<PairBasis>, i: usize) -> MonomialSum {
    MonomialSum::basis_element(b.clone(), i % b.len())
}

fn sum(b: &Arc<PairBasis>, coeffs: &[(usize, i64)]) -> MonomialSum {
    MonomialSum::from_terms(b.clone(), coeffs.iter().map(|&(i, c)| (i % b.len(), Rational64::from_integer(c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_commutative_and_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let b = gl23();
        let (x, y, z) = (be(&b, i), be(&b, j), be(&b, k));
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn b_is_a_ring_homomorphism(xs in prop::collection::vec((0usize..64, -3i64..4), 1..4), ys in prop::collection::vec((0usize..64, -3i64..4), 1..4)) {
        let b = gl23();
        let (x, y) = (sum(&b, &xs), sum(&b, &ys));
        prop_assert_eq!(x.mul(&y).unwrap().b_map(), x.b_map().tensor(&y.b_map()).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().b_map(), x.b_map().add(&y.b_map()).unwrap());
    }

    #[test]
    fn adjunction_on_sums(tau in 0usize..64, rho in prop::collection::vec((0usize..64, -2i64..3), 1..4)) {
        let b = gl23();
        let rho = sum(&b, &rho).b_map();
        let a = brauer_induction(&b, &rho, None).unwrap();
        prop_assert!(a.reproduces);
        let t = be(&b, tau);
        let lhs = t.form(&a.result).unwrap();
        let rhs = t.b_map().inner(&rho).unwrap().to_rational().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_product_is_b_compatible(q in prop::sample::select(vec![2u32, 3]), i in 0usize..16, j in 0usize..16) {
        let ctx = ctx();
        let (b1, b2) = (ctx.basis(q, &[1]).unwrap(), ctx.basis(q, &[1]).unwrap());
        let x = GradedRPlus::single(q, vec![1], be(&b1, i));
        let y = GradedRPlus::single(q, vec![1], be(&b2, j));
        let p = m_plus(ctx, &x, &y, false).unwrap();
        prop_assert_eq!(p.b_map(), m_r(ctx, &x.b_map(), &y.b_map()).unwrap());
    }
}

#[test]
fn unit_of_the_product() {
    let b = gl23();
    let top = b.pairs().iter().position(|p| p.order() == b.group().order() && p.chi.is_trivial()).unwrap();
    for i in 0..b.len() {
        assert_eq!(be(&b, top).mul(&be(&b, i)).unwrap(), be(&b, i));
    }
}

#[test]
fn form_is_not_symmetric() {
    let b = ctx().basis(2, &[2]).unwrap();
    let one = b.pairs().iter().position(|p| p.order() == 1).unwrap();
    let top = b.pairs().iter().position(|p| p.order() == 6 && p.chi.is_trivial()).unwrap();
    assert_eq!(b.form(one, top), 1);
    assert_eq!(b.form(top, one), 0);
}

#[test]
fn brauer_induction_of_trivial_and_regular() {
    for q in [2, 3] {
        let b = ctx().basis(q, &[2]).unwrap();
        let g = b.group().clone();
        let top = b.pairs().iter().position(|p| p.order() == g.order() && p.chi.is_trivial()).unwrap();
        let triv = brauer_induction(&b, &glpsh_core::classfn::ClassFunction::trivial(g.clone()), None).unwrap();
        assert_eq!(triv.result, be(&b, top));
        let reg = brauer_induction(&b, &glpsh_core::classfn::ClassFunction::regular(g.clone()), None).unwrap();
        assert!(reg.reproduces && reg.integral);
        let zero = brauer_induction(&b, &glpsh_core::classfn::ClassFunction::zero(g), None).unwrap();
        assert!(zero.result.is_zero());
    }
}
