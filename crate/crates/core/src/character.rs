//! Linear characters of subgroups, abelianizations via Smith normal form,
//! and pairs `(H, phi)`.

use num_integer::Integer;
use serde::Serialize;

use crate::cyclo::{Cyclotomic, Root};
use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};

/// A homomorphism `H -> mu_N`, stored as exponents modulo `order`, aligned
/// with the sorted elements of `H`. The order is always minimal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearCharacter {
    order: u32,
    exps: Vec<u32>,
}

impl LinearCharacter {
    pub fn trivial(size: usize) -> Self {
        LinearCharacter { order: 1, exps: vec![0; size] }
    }

    /// Exponents at `level`, reduced to the smallest possible level.
    pub fn from_exps(level: u32, exps: Vec<u32>) -> Self {
        let g = exps.iter().fold(level, |acc, &e| acc.gcd(&(e % level)));
        LinearCharacter {
            order: level / g,
            exps: exps.into_iter().map(|e| (e % level) / g).collect(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Value at the element in position `pos` of the domain.
    pub fn root_at(&self, pos: usize) -> Root {
        Root::new(self.exps[pos] as i64, self.order)
    }

    pub fn exp_at_level(&self, pos: usize, level: u32) -> u32 {
        self.exps[pos] * (level / self.order)
    }

    /// Pointwise product of two characters on the same domain.
    pub fn mul(&self, other: &Self) -> Self {
        let l = self.order.lcm(&other.order);
        let exps = (0..self.exps.len())
            .map(|i| self.exp_at_level(i, l) + other.exp_at_level(i, l))
            .collect();
        Self::from_exps(l, exps)
    }

    pub fn inverse(&self) -> Self {
        let exps = self.exps.iter().map(|&e| (self.order - e) % self.order).collect();
        LinearCharacter { order: self.order, exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
}

/// A subgroup with a linear character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub set: ElemSet,
    pub chi: LinearCharacter,
}

impl Pair {
    pub fn new(set: ElemSet, chi: LinearCharacter) -> Self {
        assert_eq!(set.len(), chi.len());
        Pair { set, chi }
    }

    pub fn trivial_on(set: ElemSet) -> Self {
        let n = set.len();
        Pair { set, chi: LinearCharacter::trivial(n) }
    }

    pub fn order(&self) -> usize {
        self.set.len()
    }

    /// `phi(x)` for `x` in the subgroup.
    pub fn value(&self, x: u32) -> Option<Root> {
        self.set.position(x).map(|p| self.chi.root_at(p))
    }

    /// `(g H g^-1, h -> phi(g^-1 h g))`.
    pub fn conjugate(&self, group: &Group, g: u32) -> Pair {
        let set = group.conjugate_set(&self.set, g);
        let gi = group.inv(g);
        let exps = set
            .elems()
            .iter()
            .map(|&y| self.chi.exps[self.set.position(group.conj(gi, y)).unwrap()])
            .collect();
        Pair { set, chi: LinearCharacter { order: self.chi.order, exps } }
    }

    /// Restriction to a subgroup of `H`.
    pub fn restrict(&self, sub: &ElemSet) -> Pair {
        let exps = sub.elems().iter().map(|&x| self.chi.exps[self.set.position(x).unwrap()]).collect();
        Pair { set: sub.clone(), chi: LinearCharacter::from_exps(self.chi.order, exps) }
    }

    /// `self <= (g other g^-1, other^g)`: containment and agreement of the
    /// characters, `phi(h) = phi'(g^-1 h g)`.
    pub fn is_subconjugate(&self, group: &Group, g: u32, other: &Pair) -> bool {
        let gi = group.inv(g);
        self.set.elems().iter().enumerate().all(|(i, &h)| {
            let y = group.conj(gi, h);
            match other.set.position(y) {
                Some(p) => self.chi.root_at(i) == other.chi.root_at(p),
                None => false,
            }
        })
    }

    /// Check that `chi` is a homomorphism on a closed set.
    pub fn is_homomorphism(&self, group: &Group) -> bool {
        let elems = self.set.elems();
        elems.iter().enumerate().all(|(i, &a)| {
            elems.iter().enumerate().all(|(j, &b)| match self.set.position(group.mul(a, b)) {
                Some(k) => self.chi.root_at(i).mul(self.chi.root_at(j)) == self.chi.root_at(k),
                None => false,
            })
        })
    }

    pub fn value_cyclotomic(&self, x: u32) -> Option<Cyclotomic> {
        self.value(x).map(Root::to_cyclotomic)
    }
}

/// The commutator subgroup of `H`.
pub fn derived_subgroup(group: &Group, h: &ElemSet) -> ElemSet {
    let gens = group.generators_of(h);
    let mut comms = Vec::new();
    for &a in &gens {
        for &b in &gens {
            let c = group.mul(group.mul(a, b), group.mul(group.inv(a), group.inv(b)));
            comms.push(c);
        }
    }
    // normal closure of commutators of generators is the derived subgroup
    let mut d = group.closure(&comms);
    loop {
        let extra: Vec<u32> = d
            .elems()
            .iter()
            .flat_map(|&x| gens.iter().map(move |&g| (g, x)))
            .map(|(g, x)| group.conj(g, x))
            .filter(|y| !d.contains(*y))
            .collect();
        if extra.is_empty() {
            return d;
        }
        d = group.extend(&d, &extra);
    }
}

/// `H / [H, H]` as a product of cyclic groups of orders `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct Abelianization {
    pub derived: ElemSet,
    pub invariants: Vec<u32>,
    /// Coordinates of each element of `H` (by position), modulo the invariants.
    pub proj: Vec<Vec<u32>>,
}

impl Abelianization {
    pub fn order(&self) -> usize {
        self.invariants.iter().map(|&d| d as usize).product()
    }

    pub fn exponent(&self) -> u32 {
        self.invariants.iter().fold(1, |a, &d| a.lcm(&d))
    }
}

pub fn abelianization(group: &Group, h: &ElemSet) -> Abelianization {
    let derived = derived_subgroup(group, h);
    let gens = group.generators_of(h);

    // Polycyclic presentation of H/D: every element is x_1^c_1 ... x_s^c_s d.
    let mut coord: Vec<Option<Vec<i64>>> = vec![None; h.len()];
    for &d in derived.elems() {
        coord[h.position(d).unwrap()] = Some(Vec::new());
    }
    let mut sub = derived.clone();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    let mut pc_gens: Vec<u32> = Vec::new();
    let pad = |v: &[i64], s: usize| {
        let mut w = v.to_vec();
        w.resize(s, 0);
        w
    };
    for &x in &gens {
        if sub.contains(x) {
            continue;
        }
        let s = pc_gens.len() + 1;
        let mut r = 1;
        let mut p = x;
        while !sub.contains(p) {
            p = group.mul(p, x);
            r += 1;
        }
        let mut rel = pad(coord[h.position(p).unwrap()].as_ref().unwrap(), s);
        rel.iter_mut().for_each(|c| *c = -*c);
        rel[s - 1] += r;
        for row in relations.iter_mut() {
            row.push(0);
        }
        relations.push(rel);
        pc_gens.push(x);

        let old: Vec<u32> = sub.elems().to_vec();
        let mut all = old.clone();
        for &y in &old {
            let cy = pad(coord[h.position(y).unwrap()].as_ref().unwrap(), s);
            let mut z = y;
            for j in 1..r {
                z = group.mul(z, x);
                let mut cz = cy.clone();
                cz[s - 1] += j;
                coord[h.position(z).unwrap()] = Some(cz);
                all.push(z);
            }
        }
        sub = group.set_from(all);
    }
    debug_assert_eq!(sub.len(), h.len());
    let s = pc_gens.len();

    let (diag, v) = smith_normal_form(relations, s);
    let keep: Vec<usize> = (0..s).filter(|&i| diag[i] > 1).collect();
    let invariants: Vec<u32> = keep.iter().map(|&i| diag[i] as u32).collect();
    let proj = coord
        .iter()
        .map(|c| {
            let c = pad(c.as_ref().unwrap(), s);
            keep.iter()
                .map(|&j| {
                    let val: i64 = (0..s).map(|i| c[i] * v[i][j]).sum();
                    val.rem_euclid(diag[j]) as u32
                })
                .collect()
        })
        .collect();
    Abelianization { derived, invariants, proj }
}

/// Smith normal form of a square nonsingular integer matrix. Returns the
/// diagonal (with `d_i | d_{i+1}`) and the column transform `V` with
/// `U A V = D`.
pub fn smith_normal_form(mut a: Vec<Vec<i64>>, n: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    let mut v: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let swap_cols = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // column j -= q * column i
    let col_op = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize, q: i64| {
        for row in a.iter_mut() {
            row[j] -= q * row[i];
        }
        for row in v.iter_mut() {
            row[j] -= q * row[i];
        }
    };
    for t in 0..n {
        loop {
            // pivot: smallest nonzero absolute value in the lower-right block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            swap_cols(&mut a, &mut v, t, pj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    let pivot_row = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= q * y;
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    col_op(&mut a, &mut v, t, j, q);
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    let row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            a[t].iter_mut().for_each(|x| *x = -*x);
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// All linear characters of `H`, in lexicographic order of their coordinates
/// on the invariant factors.
pub fn linear_characters(group: &Group, h: &ElemSet) -> Vec<LinearCharacter> {
    let ab = abelianization(group, h);
    characters_from(&ab)
}

pub fn characters_from(ab: &Abelianization) -> Vec<LinearCharacter> {
    let n = ab.exponent();
    let mut out = Vec::with_capacity(ab.order());
    let mut c = vec![0u32; ab.invariants.len()];
    loop {
        let exps = ab
            .proj
            .iter()
            .map(|p| {
                let e: u64 = p
                    .iter()
                    .zip(&c)
                    .zip(&ab.invariants)
                    .map(|((&x, &ci), &d)| x as u64 * ci as u64 * (n / d) as u64)
                    .sum();
                (e % n as u64) as u32
            })
            .collect();
        out.push(LinearCharacter::from_exps(n, exps));
        // odometer, last coordinate fastest
        let mut i = c.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < ab.invariants[i] {
                break;
            }
            c[i] = 0;
        }
    }
}

/// Characters of a subgroup together with a check that each is a homomorphism.
pub fn verified_characters(group: &Group, h: &ElemSet) -> Result<Vec<LinearCharacter>> {
    let chars = linear_characters(group, h);
    for chi in &chars {
        if !Pair::new(h.clone(), chi.clone()).is_homomorphism(group) {
            return Err(Error::NotSubgroup("character is not a homomorphism".into()));
        }
    }
    Ok(chars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::matrix::DEFAULT_ORDER_CAP;
    use std::sync::Arc;

    fn gl(n: usize, p: u32) -> Group {
        Group::gl(Arc::new(FiniteField::new(p, 1).unwrap()), n, DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn abelianization_of_small_groups() {
        let g = gl(2, 2);
        let ab = abelianization(&g, &g.all());
        assert_eq!(ab.derived.len(), 3);
        assert_eq!(ab.invariants, vec![2]);
        let g = gl(2, 3);
        let ab = abelianization(&g, &g.all());
        assert_eq!(ab.order(), 2);
        // the derived subgroup is the kernel of the determinant
        let f = g.field().clone();
        let sl: Vec<u32> = (0..g.order() as u32).filter(|&x| g.elem(x).det(&f) == 1).collect();
        assert_eq!(ab.derived.elems(), &sl[..]);
    }

    #[test]
    fn characters_of_small_groups() {
        let g = gl(2, 2);
        let chars = verified_characters(&g, &g.all()).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars[0].is_trivial());
        assert_eq!(chars[1].order(), 2);
        assert_eq!(verified_characters(&g, &g.trivial()).unwrap().len(), 1);

        // cyclic subgroup of order 3
        let c3 = g.closure(&[(0..6).find(|&x| g.order_of(x) == 3).unwrap()]);
        let chars = verified_characters(&g, &c3).unwrap();
        assert_eq!(chars.len(), 3);
        let gen_pos = c3.position(c3.elems().iter().copied().find(|&x| x != g.identity()).unwrap()).unwrap();
        let mut vals: Vec<u32> = chars.iter().map(|c| c.exps()[gen_pos] * (3 / c.order())).collect();
        vals.sort();
        assert_eq!(vals, vec![0, 1, 2]);
    }

    #[test]
    fn characters_kill_derived_subgroup() {
        let g = gl(2, 3);
        for x in 0..g.order() as u32 {
            for y in [0u32, 5, 17] {
                let h = g.closure(&[x, y]);
                let ab = abelianization(&g, &h);
                let chars = characters_from(&ab);
                assert_eq!(chars.len() * ab.derived.len(), h.len());
                for chi in &chars {
                    for &d in ab.derived.elems() {
                        assert_eq!(chi.exps()[h.position(d).unwrap()], 0);
                    }
                    assert!(Pair::new(h.clone(), chi.clone()).is_homomorphism(&g));
                }
                let distinct: std::collections::HashSet<_> = chars.iter().collect();
                assert_eq!(distinct.len(), chars.len());
            }
        }
    }

    #[test]
    fn smith_form_divisibility() {
        let (d, _) = smith_normal_form(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(d, vec![1, 6]);
        let (d, _) = smith_normal_form(vec![vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 2]], 3);
        assert_eq!(d, vec![2, 2, 12]);
    }

    #[test]
    fn subconjugacy_examples() {
        let g = gl(2, 3);
        let all = g.all();
        let chars = linear_characters(&g, &all);
        let p0 = Pair::new(all.clone(), chars[0].clone());
        let p1 = Pair::new(all.clone(), chars[1].clone());
        assert!(p0.is_subconjugate(&g, g.identity(), &p0));
        let triv = Pair::trivial_on(g.trivial());
        for x in 0..g.order() as u32 {
            assert!(triv.is_subconjugate(&g, x, &p1));
        }
        for &z in g.center().elems() {
            assert!(!p0.is_subconjugate(&g, z, &p1));
        }
    }
}
