//! Finite matrix groups stored as sorted element arrays, with subsets of a
//! group represented by [`ElemSet`]s of element indices.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::matrix::{block_embed, gl_enumerate, Mat};

/// Groups up to this order get a precomputed multiplication table.
pub const CAYLEY_TABLE_MAX: usize = 5_000;

/// A sorted set of element indices with a membership bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElemSet {
    elems: Vec<u32>,
    mask: Vec<u64>,
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.elems.cmp(&other.elems)
    }
}

impl ElemSet {
    pub fn from_sorted(elems: Vec<u32>, universe: usize) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let mut mask = vec![0u64; universe.div_ceil(64)];
        for &e in &elems {
            mask[e as usize / 64] |= 1 << (e % 64);
        }
        ElemSet { elems, mask }
    }

    pub fn from_unsorted(mut elems: Vec<u32>, universe: usize) -> Self {
        elems.sort_unstable();
        elems.dedup();
        Self::from_sorted(elems, universe)
    }

    pub fn from_mask(mask: Vec<u64>) -> Self {
        let mut elems = Vec::new();
        for (w, &bits) in mask.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let t = b.trailing_zeros();
                elems.push(w as u32 * 64 + t);
                b &= b - 1;
            }
        }
        ElemSet { elems, mask }
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.mask
            .get(x as usize / 64)
            .is_some_and(|w| w & (1 << (x % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn mask(&self) -> &[u64] {
        &self.mask
    }

    /// Position of `x` in the sorted element list.
    pub fn position(&self, x: u32) -> Option<usize> {
        self.elems.binary_search(&x).ok()
    }

    pub fn intersect(&self, other: &ElemSet) -> ElemSet {
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| a & b).collect();
        ElemSet::from_mask(mask)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| a & !b == 0)
    }

    /// Order by size, then by sorted element sequence.
    pub fn canonical_cmp(&self, other: &ElemSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.elems.cmp(&other.elems))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyClasses {
    /// Least element index of each class, ascending.
    pub reps: Vec<u32>,
    pub members: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn size(&self, c: usize) -> usize {
        self.members[c].len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleCosetDecomp {
    /// Least element index of each double coset, ascending.
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
}

pub struct Group {
    label: String,
    field: Arc<FiniteField>,
    dim: usize,
    elems: Vec<Mat>,
    index: HashMap<Mat, u32>,
    identity: u32,
    inv: Vec<u32>,
    table: Option<Vec<u16>>,
    orders: Vec<u32>,
    exponent: u32,
    classes: OnceLock<ConjugacyClasses>,
    generators: OnceLock<Vec<u32>>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group({}, order {})", self.label, self.order())
    }
}

impl Group {
    /// Build a group from a closed set of invertible matrices.
    pub fn from_elements(label: impl Into<String>, field: Arc<FiniteField>, mut elems: Vec<Mat>) -> Result<Self> {
        let label = label.into();
        elems.sort_unstable();
        elems.dedup();
        let dim = elems.first().map(Mat::dim).ok_or_else(|| Error::NotSubgroup("empty".into()))?;
        if elems.iter().any(|m| m.dim() != dim) {
            return Err(Error::NotSubgroup(format!("{label}: mixed dimensions")));
        }
        let index: HashMap<Mat, u32> = elems.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let identity = *index
            .get(&Mat::identity(dim))
            .ok_or_else(|| Error::NotSubgroup(format!("{label}: no identity")))?;
        let n = elems.len();
        let f = &*field;
        let lookup = |m: &Mat| index.get(m).copied();

        let table = if n <= CAYLEY_TABLE_MAX {
            let mut t = vec![0u16; n * n];
            for (i, a) in elems.iter().enumerate() {
                for (j, b) in elems.iter().enumerate() {
                    let ab = a.mul_unchecked(b, f);
                    t[i * n + j] = lookup(&ab)
                        .ok_or_else(|| Error::NotSubgroup(format!("{label}: not closed")))?
                        as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        let mut inv = Vec::with_capacity(n);
        for m in &elems {
            let mi = m.inv(f)?;
            inv.push(lookup(&mi).ok_or_else(|| Error::NotSubgroup(format!("{label}: no inverse")))?);
        }

        let mut g = Group {
            label,
            field,
            dim,
            elems,
            index,
            identity,
            inv,
            table,
            orders: Vec::new(),
            exponent: 1,
            classes: OnceLock::new(),
            generators: OnceLock::new(),
        };
        let orders: Vec<u32> = (0..n as u32).map(|x| g.element_order(x)).collect();
        g.exponent = orders.iter().fold(1u32, |acc, &o| acc.lcm(&o));
        g.orders = orders;
        Ok(g)
    }

    /// `GL_n(F_q)`.
    pub fn gl(field: Arc<FiniteField>, n: usize, cap: usize) -> Result<Self> {
        Self::block_product(field, &[n], cap)
    }

    /// `GL_{a_1} x ... x GL_{a_r}` embedded block-diagonally in `GL_{sum a_i}`.
    /// Zero parts are allowed and contribute nothing.
    pub fn block_product(field: Arc<FiniteField>, degrees: &[usize], cap: usize) -> Result<Self> {
        let parts: Vec<usize> = degrees.iter().copied().filter(|&a| a > 0).collect();
        let order: u128 = parts.iter().map(|&a| crate::matrix::gl_order(a, field.order())).product();
        if order > cap as u128 {
            return Err(Error::OrderCap { order, cap });
        }
        let factors: Vec<Vec<Mat>> = parts
            .iter()
            .map(|&a| gl_enumerate(&field, a, cap))
            .collect::<Result<_>>()?;
        let mut elems = vec![Vec::<Mat>::new()];
        for fac in &factors {
            let mut next = Vec::with_capacity(elems.len() * fac.len());
            for prefix in &elems {
                for m in fac {
                    let mut v = prefix.clone();
                    v.push(*m);
                    next.push(v);
                }
            }
            elems = next;
        }
        let mats: Vec<Mat> = elems.iter().map(|bs| block_embed(bs)).collect::<Result<_>>()?;
        Self::from_elements(shape_label(field.order(), &parts), field, mats)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn elem(&self, i: u32) -> &Mat {
        &self.elems[i as usize]
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elems
    }

    pub fn find(&self, m: &Mat) -> Option<u32> {
        self.index.get(m).copied()
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elems.len() + b as usize] as u32,
            None => {
                let m = self.elems[a as usize].mul_unchecked(&self.elems[b as usize], &self.field);
                self.index[&m]
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// `g x g^-1`.
    #[inline]
    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn order_of(&self, x: u32) -> u32 {
        self.orders[x as usize]
    }

    fn element_order(&self, x: u32) -> u32 {
        let mut y = x;
        let mut n = 1;
        while y != self.identity {
            y = self.mul(y, x);
            n += 1;
        }
        n
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::from_sorted((0..self.order() as u32).collect(), self.order())
    }

    pub fn trivial(&self) -> ElemSet {
        ElemSet::from_sorted(vec![self.identity], self.order())
    }

    pub fn set_from(&self, elems: Vec<u32>) -> ElemSet {
        ElemSet::from_unsorted(elems, self.order())
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[u32]) -> ElemSet {
        self.extend(&self.trivial(), gens)
    }

    /// Subgroup generated by a subgroup `base` and extra elements.
    pub fn extend(&self, base: &ElemSet, extra: &[u32]) -> ElemSet {
        if extra.iter().all(|&g| base.contains(g)) {
            return base.clone();
        }
        let base_gens = self.generators_of(base);
        self.extend_with(base, &base_gens, extra)
    }

    /// Like [`Group::extend`] when generators of `base` are already known.
    pub fn extend_with(&self, base: &ElemSet, base_gens: &[u32], extra: &[u32]) -> ElemSet {
        let mut gens = base_gens.to_vec();
        gens.extend(extra.iter().copied().filter(|&g| !base.contains(g)));
        if gens.len() == base_gens.len() {
            return base.clone();
        }
        let mut mask = base.mask().to_vec();
        let mut members = base.elems().to_vec();
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            i += 1;
            for &h in &gens {
                let y = self.mul(x, h);
                if mask[y as usize / 64] & (1 << (y % 64)) == 0 {
                    mask[y as usize / 64] |= 1 << (y % 64);
                    members.push(y);
                }
            }
        }
        ElemSet::from_mask(mask)
    }

    /// A small generating set of a subgroup: greedy over its elements,
    /// highest order first.
    pub fn generators_of(&self, set: &ElemSet) -> Vec<u32> {
        let mut span = self.trivial();
        let mut gens = Vec::new();
        let mut cand: Vec<u32> = set.elems().to_vec();
        cand.sort_by_key(|&x| (std::cmp::Reverse(self.order_of(x)), x));
        for x in cand {
            if span.len() == set.len() {
                break;
            }
            if !span.contains(x) {
                span = self.extend_with(&span, &gens, &[x]);
                gens.push(x);
            }
        }
        gens
    }

    /// Generating set of the whole group, fixed once computed.
    pub fn generators(&self) -> &[u32] {
        self.generators.get_or_init(|| self.generators_of(&self.all()))
    }

    pub fn is_subgroup(&self, set: &ElemSet) -> bool {
        set.contains(self.identity)
            && set.elems().iter().all(|&a| {
                set.contains(self.inv(a)) && set.elems().iter().all(|&b| set.contains(self.mul(a, b)))
            })
    }

    /// `g S g^-1`.
    pub fn conjugate_set(&self, set: &ElemSet, g: u32) -> ElemSet {
        let gi = self.inv(g);
        let v = set.elems().iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
        ElemSet::from_unsorted(v, self.order())
    }

    pub fn normalizer(&self, set: &ElemSet) -> ElemSet {
        let v = (0..self.order() as u32)
            .filter(|&g| set.elems().iter().all(|&x| set.contains(self.conj(g, x))))
            .collect();
        ElemSet::from_sorted(v, self.order())
    }

    pub fn centralizer(&self, set: &ElemSet) -> ElemSet {
        let v = (0..self.order() as u32)
            .filter(|&g| set.elems().iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
            .collect();
        ElemSet::from_sorted(v, self.order())
    }

    pub fn center(&self) -> ElemSet {
        self.centralizer(&self.all())
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        self.classes.get_or_init(|| {
            let n = self.order();
            let mut class_of = vec![u32::MAX; n];
            let mut reps = Vec::new();
            let mut members = Vec::new();
            let gens = self.generators().to_vec();
            for x in 0..n as u32 {
                if class_of[x as usize] != u32::MAX {
                    continue;
                }
                let c = reps.len() as u32;
                class_of[x as usize] = c;
                let mut orbit = vec![x];
                let mut i = 0;
                while i < orbit.len() {
                    let y = orbit[i];
                    i += 1;
                    for &g in &gens {
                        let z = self.conj(g, y);
                        if class_of[z as usize] == u32::MAX {
                            class_of[z as usize] = c;
                            orbit.push(z);
                        }
                    }
                }
                orbit.sort_unstable();
                reps.push(x);
                members.push(orbit);
            }
            ConjugacyClasses { reps, members, class_of }
        })
    }

    pub fn class_of(&self, x: u32) -> usize {
        self.classes().class_of[x as usize] as usize
    }

    /// Elements of the double coset `K x H`, sorted.
    pub fn double_coset(&self, k: &ElemSet, x: u32, h: &ElemSet) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(k.len());
        for &a in k.elems() {
            let ax = self.mul(a, x);
            for &b in h.elems() {
                out.push(self.mul(ax, b));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `K \ G / H` with least-index representatives.
    pub fn double_cosets(&self, k: &ElemSet, h: &ElemSet) -> DoubleCosetDecomp {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for x in 0..n as u32 {
            if seen[x as usize] {
                continue;
            }
            let dc = self.double_coset(k, x, h);
            for &y in &dc {
                seen[y as usize] = true;
            }
            reps.push(x);
            sizes.push(dc.len());
        }
        DoubleCosetDecomp { reps, sizes }
    }

    /// Left cosets `gH`: least-index representatives and the coset index of
    /// every element.
    pub fn left_cosets(&self, h: &ElemSet) -> (Vec<u32>, Vec<u32>) {
        let n = self.order();
        let mut coset_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            for &x in h.elems() {
                coset_of[self.mul(g, x) as usize] = c;
            }
            reps.push(g);
        }
        (reps, coset_of)
    }

    /// Index of `m` after checking it lies in this group.
    pub fn index_of(&self, m: &Mat) -> Result<u32> {
        self.find(m)
            .ok_or_else(|| Error::NotSubgroup(format!("{:?} is not in {}", m, self.label)))
    }
}

/// Label such as `gl:2:3` or `gl:1:3,gl:1:3`; the trivial product is `gl:0:q`.
pub fn shape_label(q: u32, parts: &[usize]) -> String {
    if parts.is_empty() {
        return format!("gl:0:{q}");
    }
    parts.iter().map(|a| format!("gl:{a}:{q}")).collect::<Vec<_>>().join(",")
}

/// A subgroup together with its ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub ambient: Arc<Group>,
    pub set: ElemSet,
}

impl Subgroup {
    pub fn new(ambient: Arc<Group>, set: ElemSet) -> Result<Self> {
        if !ambient.is_subgroup(&set) {
            return Err(Error::NotSubgroup(format!("subset of {}", ambient.label())));
        }
        Ok(Subgroup { ambient, set })
    }

    pub fn generated(ambient: Arc<Group>, gens: &[u32]) -> Self {
        let set = ambient.closure(gens);
        Subgroup { ambient, set }
    }

    pub fn order(&self) -> usize {
        self.set.len()
    }

    /// Materialize the subgroup as a group of its own.
    pub fn to_group(&self, label: impl Into<String>) -> Result<Group> {
        let mats = self.set.elems().iter().map(|&x| *self.ambient.elem(x)).collect();
        Group::from_elements(label, self.ambient.field().clone(), mats)
    }
}
