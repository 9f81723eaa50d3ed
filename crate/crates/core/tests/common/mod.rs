//! Brute-force oracles shared by the integration tests. They use only the
//! multiplication table of a group and character values on elements.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use glpsh_core::character::{linear_characters, Pair};
use glpsh_core::classfn::ClassFunction;
use glpsh_core::cyclo::Cyclotomic;
use glpsh_core::group::Group;
use num_rational::Rational64;

/// Closure of a generating set by breadth-first multiplication.
pub fn naive_closure(g: &Group, gens: &[u32]) -> BTreeSet<u32> {
    let mut seen: BTreeSet<u32> = BTreeSet::from([g.identity()]);
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Every subgroup generated by at most two elements.
pub fn two_generated_subgroups(g: &Group) -> HashSet<BTreeSet<u32>> {
    let n = g.order() as u32;
    let mut out = HashSet::new();
    for a in 0..n {
        for b in a..n {
            out.insert(naive_closure(g, &[a, b]));
        }
    }
    out
}

/// Every subgroup, by closing each subgroup found so far under one more
/// element until nothing new appears.
pub fn all_subgroups(g: &Group) -> HashSet<BTreeSet<u32>> {
    let n = g.order() as u32;
    let mut found: HashSet<BTreeSet<u32>> = HashSet::from([BTreeSet::from([g.identity()])]);
    let mut layer: Vec<BTreeSet<u32>> = found.iter().cloned().collect();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for h in &layer {
            for x in 0..n {
                if h.contains(&x) {
                    continue;
                }
                let mut gens: Vec<u32> = h.iter().copied().collect();
                gens.push(x);
                let k = naive_closure(g, &gens);
                if found.insert(k.clone()) {
                    next.push(k);
                }
            }
        }
        layer = next;
    }
    found
}

/// `Ind_H^G(phi)(x) = (1/|H|) sum over g in G with g x g^-1 in H of phi(g x g^-1)`.
pub fn induced_by_sum(g: &Arc<Group>, p: &Pair) -> ClassFunction {
    let n = g.exponent();
    let h = p.order() as i64;
    ClassFunction::from_fn(g.clone(), |x| {
        let mut acc = Cyclotomic::zero(n);
        for y in 0..g.order() as u32 {
            if let Some(v) = p.value(g.conj(y, x)) {
                acc += &v.to_cyclotomic();
            }
        }
        acc.scale(Rational64::new(1, h))
    })
}

/// `<phi, Res f>_H`, summed over the elements of `H`.
pub fn inner_on_subgroup(p: &Pair, f: &ClassFunction) -> Cyclotomic {
    let mut acc = Cyclotomic::zero(f.group().exponent());
    for &x in p.set.elems() {
        acc += &(&p.value(x).unwrap().to_cyclotomic() * &f.at(x).conj());
    }
    acc.scale(Rational64::new(1, p.order() as i64))
}

/// Commutator subgroup from all commutators, not just those of generators.
pub fn naive_derived(g: &Group, h: &[u32]) -> BTreeSet<u32> {
    let mut comms = Vec::new();
    for &a in h {
        for &b in h {
            comms.push(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
        }
    }
    naive_closure(g, &comms)
}

/// Number of conjugacy classes of pairs `(H, phi)`, by brute-force orbits on
/// the set of all pairs.
pub fn pair_orbit_count(g: &Group) -> usize {
    let subs = all_subgroups(g);
    let mut all: Vec<Pair> = Vec::new();
    for h in &subs {
        let set = g.set_from(h.iter().copied().collect());
        for chi in linear_characters(g, &set) {
            all.push(Pair::new(set.clone(), chi));
        }
    }
    let index: std::collections::HashMap<Pair, usize> = all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut seen = vec![false; all.len()];
    let mut orbits = 0;
    for i in 0..all.len() {
        if seen[i] {
            continue;
        }
        orbits += 1;
        for y in 0..g.order() as u32 {
            seen[index[&all[i].conjugate(g, y)]] = true;
        }
    }
    orbits
}
