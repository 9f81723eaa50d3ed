mod common;

use std::collections::BTreeSet;

use common::*;
use glpsh_core::character::linear_characters;
use glpsh_core::context::{Caps, Context};
use glpsh_core::cyclo::Cyclotomic;
use glpsh_core::group::Group;

fn ctx() -> Context {
    Context::new(Caps::default())
}

fn lattice_sets(ctx: &Context, q: u32, shape: &[usize]) -> BTreeSet<BTreeSet<u32>> {
    let lat = ctx.lattice(q, shape).unwrap();
    lat.subgroups.iter().map(|s| s.elems().iter().copied().collect()).collect()
}

#[test]
fn subgroup_counts() {
    let ctx = ctx();
    assert_eq!(lattice_sets(&ctx, 3, &[1]).len(), 2);
    assert_eq!(lattice_sets(&ctx, 2, &[2]).len(), 6);
    for (q, shape) in [(2, vec![2]), (3, vec![1, 1]), (4, vec![1]), (3, vec![2])] {
        let g = ctx.group(q, &shape).unwrap();
        let naive: BTreeSet<BTreeSet<u32>> = all_subgroups(&g).into_iter().collect();
        assert_eq!(lattice_sets(&ctx, q, &shape), naive, "q={q} shape={shape:?}");
    }
}

#[test]
fn gl23_subgroups_are_two_generated() {
    let ctx = ctx();
    let g = ctx.group(3, &[2]).unwrap();
    let by_extension: BTreeSet<BTreeSet<u32>> = all_subgroups(&g).into_iter().collect();
    let by_pairs: BTreeSet<BTreeSet<u32>> = two_generated_subgroups(&g).into_iter().collect();
    assert_eq!(by_extension, by_pairs);
    assert_eq!(lattice_sets(&ctx, 3, &[2]), by_pairs);
}

fn check_characters(g: &Group) {
    for h in all_subgroups(g) {
        let elems: Vec<u32> = h.iter().copied().collect();
        let set = g.set_from(elems.clone());
        let chars = linear_characters(g, &set);
        let derived = naive_derived(g, &elems);
        assert_eq!(chars.len() * derived.len(), elems.len());
        let distinct: BTreeSet<Vec<u32>> = chars.iter().map(|c| c.exps().to_vec()).collect();
        assert_eq!(distinct.len(), chars.len());
        for chi in chars {
            let p = glpsh_core::character::Pair::new(set.clone(), chi);
            for &a in &elems {
                for &b in &elems {
                    let ab = g.mul(a, b);
                    assert_eq!(p.value(ab).unwrap(), p.value(a).unwrap().mul(p.value(b).unwrap()));
                }
            }
        }
    }
}

#[test]
fn linear_characters_are_all_homomorphisms() {
    let ctx = ctx();
    check_characters(&ctx.group(2, &[2]).unwrap());
    check_characters(&ctx.group(3, &[2]).unwrap());
    check_characters(&ctx.group(3, &[1, 1]).unwrap());
}

#[test]
fn pair_counts_match_orbit_oracle() {
    let ctx = ctx();
    for (q, shape) in [(2, vec![0]), (3, vec![1]), (4, vec![1]), (2, vec![2]), (3, vec![1, 1]), (3, vec![2])] {
        let basis = ctx.basis(q, &shape).unwrap();
        assert_eq!(basis.len(), pair_orbit_count(basis.group()), "q={q} shape={shape:?}");
    }
    assert_eq!(ctx.basis(2, &[0]).unwrap().len(), 1);
    // the order 4 group: itself with 4 characters, three lines with 2 each, and 1
    assert_eq!(ctx.basis(3, &[1, 1]).unwrap().len(), 11);
}

#[test]
fn induced_characters_match_the_full_sum() {
    let ctx = ctx();
    for (q, shape) in [(2, vec![2]), (3, vec![2]), (3, vec![1, 1])] {
        let basis = ctx.basis(q, &shape).unwrap();
        for i in 0..basis.len() {
            assert_eq!(basis.induced(i), &induced_by_sum(basis.group(), basis.pair(i)), "{}", basis.key(i));
        }
    }
}

#[test]
fn frobenius_reciprocity() {
    let ctx = ctx();
    for q in [2, 3] {
        let basis = ctx.basis(q, &[2]).unwrap();
        let g = basis.group();
        let oracle: Vec<_> = (0..basis.len()).map(|i| induced_by_sum(g, basis.pair(i))).collect();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let lhs = basis.induced(i).inner(&oracle[j]).unwrap();
                assert_eq!(lhs, inner_on_subgroup(basis.pair(i), &oracle[j]));
            }
        }
    }
}

/// `[x, y]` by listing every `g`, keeping those with `(H, phi)` under
/// `g (K, psi) g^-1`, and counting the distinct double cosets `H g K`.
#[test]
fn form_counts_double_cosets() {
    let ctx = ctx();
    for q in [2, 3] {
        let basis = ctx.basis(q, &[2]).unwrap();
        let g = basis.group();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let (a, b) = (basis.pair(i), basis.pair(j));
                let mut cosets = BTreeSet::new();
                for x in 0..g.order() as u32 {
                    if a.is_subconjugate(g, x, b) {
                        let dc: BTreeSet<u32> = a
                            .set
                            .elems()
                            .iter()
                            .flat_map(|&h| b.set.elems().iter().map(move |&k| g.mul(g.mul(h, x), k)))
                            .collect();
                        cosets.insert(dc);
                    }
                }
                assert_eq!(basis.form(i, j), cosets.len() as i64);
            }
        }
    }
}

#[test]
fn products_match_pointwise_products_of_induced_characters() {
    let ctx = ctx();
    let basis = ctx.basis(3, &[1, 1]).unwrap();
    let g = basis.group();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let lhs = glpsh_core::rplus::MonomialSum::basis_element(basis.clone(), i)
                .mul(&glpsh_core::rplus::MonomialSum::basis_element(basis.clone(), j))
                .unwrap()
                .b_map();
            let rhs = induced_by_sum(g, basis.pair(i)).tensor(&induced_by_sum(g, basis.pair(j))).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn trivial_character_has_unit_norm_everywhere() {
    let ctx = ctx();
    for q in [2, 3] {
        let basis = ctx.basis(q, &[2]).unwrap();
        let top = basis.pairs().iter().position(|p| p.order() == basis.group().order() && p.chi.is_trivial()).unwrap();
        let f = basis.induced(top);
        assert_eq!(f.inner(f).unwrap(), Cyclotomic::one(basis.group().exponent()));
    }
}
