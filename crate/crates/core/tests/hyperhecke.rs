use std::sync::{Arc, OnceLock};

use glpsh_core::character::Pair;
use glpsh_core::context::Context;
use glpsh_core::cyclo::Root;
use glpsh_core::hyperhecke::{
    comul_realizes, hh_comul, join, join_elements, join_tuples, HHElement, HHMatrix, Hecke, Triple,
};
use glpsh_core::indmod::LineSystem;
use proptest::prelude::*;

struct Fixture {
    ctx: Context,
    hecke: Arc<Hecke>,
    pairs: Vec<Pair>,
    /// `triples[s][t]`: canonical triples from pair `s` to pair `t`.
    triples: Vec<Vec<Vec<Triple>>>,
}

fn fixture(q: u32) -> Fixture {
    let ctx = Context::default();
    let basis = ctx.basis(q, &[2]).unwrap();
    let hecke = Arc::new(Hecke::new(basis.group().clone()));
    let pairs = basis.pairs().to_vec();
    let triples =
        pairs.iter().map(|s| pairs.iter().map(|t| hecke.triples_between(s, t)).collect()).collect();
    Fixture { ctx, hecke, pairs, triples }
}

fn gl23() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(3))
}

fn pick(list: &[Triple], r: usize) -> Option<&Triple> {
    (!list.is_empty()).then(|| &list[r % list.len()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(a in 0usize..64, b in 0usize..64, c in 0usize..64, d in 0usize..64, r in any::<[usize; 3]>()) {
        let f = gl23();
        let n = f.pairs.len();
        let (a, b, c, d) = (a % n, b % n, c % n, d % n);
        // z: a -> b, y: b -> c, x: c -> d
        let (Some(z), Some(y), Some(x)) = (pick(&f.triples[a][b], r[0]), pick(&f.triples[b][c], r[1]), pick(&f.triples[c][d], r[2])) else {
            return Ok(());
        };
        let h = &f.hecke;
        let (ex, ey, ez) = (h.element(x), h.element(y), h.element(z));
        let left = h.compose(&h.compose(&ex, &ey), &ez);
        let right = h.compose(&ex, &h.compose(&ey, &ez));
        prop_assert_eq!(&left, &right);
        let maps = h.map(x).unwrap().compose(&h.map(y).unwrap()).unwrap().compose(&h.map(z).unwrap()).unwrap();
        let (t, c) = left.terms().iter().next().unwrap();
        let root = (0..h.group().exponent()).map(|e| Root::new(e as i64, h.group().exponent())).find(|r| r.to_cyclotomic() == *c).unwrap();
        prop_assert_eq!(h.map(t).unwrap().scale(root), maps);
    }

    #[test]
    fn normalization_preserves_the_map(s in 0usize..64, t in 0usize..64, g in 0u32..48) {
        let f = gl23();
        let n = f.pairs.len();
        let (src, tgt) = (&f.pairs[s % n], &f.pairs[t % n]);
        let h = &f.hecke;
        let Ok(raw) = h.make(src, g, tgt) else { return Ok(()) };
        let (scalar, canon) = h.normalize(&raw);
        prop_assert!(h.triples_between(src, tgt).contains(&canon));
        prop_assert_eq!(h.map(&raw).unwrap(), h.map(&canon).unwrap().scale(scalar));
        prop_assert_eq!(h.normalize(&canon), (Root::ONE, canon.clone()));
        prop_assert!(h.is_equivariant(&raw).unwrap());
    }

    #[test]
    fn factorization_identity(s in 0usize..64, t in 0usize..64, r in any::<usize>()) {
        let f = gl23();
        let n = f.pairs.len();
        let Some(x) = pick(&f.triples[s % n][t % n], r) else { return Ok(()) };
        let h = &f.hecke;
        let (left, right) = h.factorization(x).unwrap();
        let product = h.compose(&h.element(&left), &h.element(&right));
        prop_assert_eq!(product, h.element(x));
    }
}

#[test]
fn validity_needs_containment_and_agreement() {
    let f = gl23();
    let h = &f.hecke;
    let g = h.group();
    let top = f.pairs.iter().find(|p| p.order() == g.order()).unwrap();
    let one = f.pairs.iter().find(|p| p.order() == 1).unwrap();
    // the trivial subgroup maps anywhere, nothing nontrivial maps into it
    for x in 0..g.order() as u32 {
        assert!(h.make(one, x, top).is_ok());
        assert!(h.make(top, x, one).is_err());
    }
    for p in &f.pairs {
        assert!(h.make(p, g.identity(), p).is_ok());
    }
}

/// Triples whose source has no valid line comultiply to a matrix with no
/// columns; every other coproduct realizes the projected map.
#[test]
fn coproducts_over_gl23() {
    let f = gl23();
    let par = f.ctx.parabolic_2(3, 2, 1).unwrap();
    let levi = Hecke::new(par.levi().clone());
    let lines: Vec<LineSystem> =
        f.pairs.iter().map(|p| LineSystem::new(f.hecke.module(p).unwrap(), par.clone()).unwrap()).collect();
    let mut zero = 0;
    let mut total = 0;
    for (s, row) in f.triples.iter().enumerate() {
        for (t, list) in row.iter().enumerate() {
            for x in list {
                let m = hh_comul(&levi, &f.hecke, x, &lines[s], &lines[t]).unwrap();
                assert_eq!(m.cols.len(), lines[s].orbits().len());
                assert_eq!(m.rows.len(), lines[t].orbits().len());
                if lines[s].valid_count() == 0 {
                    assert!(m.is_zero());
                }
                if m.is_zero() {
                    zero += 1;
                }
                assert!(comul_realizes(&f.hecke, x, &m, &lines[s], &lines[t]).unwrap());
                total += 1;
            }
        }
    }
    assert!(total > zero && zero > 0, "{zero} of {total}");
}

#[test]
fn coproduct_is_multiplicative_on_a_gl23_sample() {
    let f = gl23();
    let par = f.ctx.parabolic_2(3, 2, 1).unwrap();
    let levi = Hecke::new(par.levi().clone());
    let lines: Vec<LineSystem> =
        f.pairs.iter().map(|p| LineSystem::new(f.hecke.module(p).unwrap(), par.clone()).unwrap()).collect();
    let n = f.pairs.len();
    let comul = |x: &Triple, s: usize, t: usize| hh_comul(&levi, &f.hecke, x, &lines[s], &lines[t]).unwrap();
    let mut checked = 0;
    for a in (0..n).step_by(3) {
        for b in (0..n).step_by(2) {
            for c in (0..n).step_by(3) {
                let (Some(y), Some(x)) = (f.triples[a][b].first(), f.triples[b][c].last()) else { continue };
                let (sc, t) = f.hecke.compose_triples(x, y).unwrap();
                let lhs: HHMatrix = comul(&t, a, c).scale(&sc.to_cyclotomic());
                assert_eq!(lhs, comul(x, b, c).mul(&levi, &comul(y, a, b)).unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

#[test]
fn join_of_identities_is_an_identity() {
    let ctx = Context::default();
    let b1 = ctx.basis(3, &[1]).unwrap();
    let left = Hecke::new(b1.group().clone());
    let target = Hecke::new(ctx.group(3, &[1, 1]).unwrap());
    for p in b1.pairs() {
        for r in b1.pairs() {
            let j = join(&target, &left, &left.identity(p), &left, &left.identity(r)).unwrap();
            assert_eq!(j.src, j.tgt);
            assert_eq!(j.g, target.group().identity());
            let e = join_elements(&target, &left, &left.element(&left.identity(p)), &left, &left.element(&left.identity(r)))
                .unwrap();
            assert_eq!(e, target.element(&target.identity(&j.src)));
        }
    }
}

#[test]
fn joins_of_tuples_of_different_length_vanish() {
    let ctx = Context::default();
    let b1 = ctx.basis(3, &[1]).unwrap();
    let h = Arc::new(Hecke::new(b1.group().clone()));
    let x = h.element(&h.identity(b1.pair(0)));
    let target = Arc::new(Hecke::new(ctx.group(3, &[1, 1]).unwrap()));
    let one = vec![(h.clone(), x.clone())];
    let two = vec![(h.clone(), x.clone()), (h.clone(), x.clone())];
    assert_eq!(join_tuples(&[target.clone()], &one, &two).unwrap(), None);
    assert_eq!(join_tuples(&[target.clone(), target.clone()], &two, &one).unwrap(), None);
    let same = join_tuples(&[target.clone()], &one, &one).unwrap().unwrap();
    assert_eq!(same.len(), 1);
    assert!(!same[0].is_zero());
    assert!(join_tuples(&[target], &two, &two).is_err());
    assert!(HHElement::zero().is_zero());
}
