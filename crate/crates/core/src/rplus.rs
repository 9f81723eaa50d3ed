//! The monomial ring `R_+(G)`: conjugacy classes of pairs `(H, phi)`, the
//! double coset product, the map `b` to class functions, the bilinear form
//! counting subconjugate double cosets, and explicit Brauer induction.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::character::{linear_characters, LinearCharacter, Pair};
use crate::classfn::ClassFunction;
use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};
use crate::lattice::SubgroupLattice;
use crate::linalg;

/// Canonical representatives of the conjugacy classes of pairs, ordered by
/// subgroup order descending, then by element list and character.
pub struct PairBasis {
    group: Arc<Group>,
    lattice: Arc<SubgroupLattice>,
    pairs: Vec<Pair>,
    lookup: HashMap<Pair, usize>,
    /// Normalizer of each class representative, keyed by lattice index.
    normalizers: HashMap<usize, Vec<u32>>,
    induced: Vec<OnceLock<ClassFunction>>,
}

impl std::fmt::Debug for PairBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PairBasis({}, {} pairs)", self.group.label(), self.pairs.len())
    }
}

/// Least conjugate of a pair under the given elements, comparing characters.
fn least_conjugate(group: &Group, pair: &Pair, by: &[u32]) -> Pair {
    let mut best = pair.clone();
    for &n in by {
        let c = pair.conjugate(group, n);
        if c.chi < best.chi {
            best = c;
        }
    }
    best
}

impl PairBasis {
    pub fn new(group: Arc<Group>, lattice: Arc<SubgroupLattice>) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut normalizers = HashMap::new();
        for class in &lattice.classes {
            let r = class[0];
            let h = &lattice.subgroups[r];
            let norm = group.normalizer(h).elems().to_vec();
            let mut seen = std::collections::BTreeSet::new();
            for chi in linear_characters(&group, h) {
                let p = least_conjugate(&group, &Pair::new(h.clone(), chi), &norm);
                seen.insert(p.chi);
            }
            for chi in seen {
                pairs.push(Pair::new(h.clone(), chi));
            }
            normalizers.insert(r, norm);
        }
        pairs.sort_by(|a, b| {
            b.order().cmp(&a.order()).then_with(|| a.set.cmp(&b.set)).then_with(|| a.chi.cmp(&b.chi))
        });
        let lookup = pairs.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let induced = (0..pairs.len()).map(|_| OnceLock::new()).collect();
        Ok(PairBasis { group, lattice, pairs, lookup, normalizers, induced })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn lattice(&self) -> &Arc<SubgroupLattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> &Pair {
        &self.pairs[i]
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Index of the canonical representative of the class of `(H, phi)`.
    pub fn canonicalize(&self, pair: &Pair) -> Result<usize> {
        let s = self
            .lattice
            .find(&pair.set)
            .ok_or_else(|| Error::NotSubgroup(format!("subset of {}", self.group.label())))?;
        let r = self.lattice.rep_of(s);
        let moved = pair.conjugate(&self.group, self.lattice.to_rep[s]);
        let best = least_conjugate(&self.group, &moved, &self.normalizers[&r]);
        self.lookup
            .get(&best)
            .copied()
            .ok_or_else(|| Error::NotSubgroup("character is not a homomorphism".into()))
    }

    /// The canonical representative pair itself.
    pub fn canonical_pair(&self, pair: &Pair) -> Result<Pair> {
        Ok(self.pairs[self.canonicalize(pair)?].clone())
    }

    /// `Ind_H^G(phi)` for a basis element, cached.
    pub fn induced(&self, i: usize) -> &ClassFunction {
        self.induced[i].get_or_init(|| ClassFunction::induce_pair(self.group.clone(), &self.pairs[i]))
    }

    /// Stable text key: subgroup order, class position and character data.
    pub fn key(&self, i: usize) -> String {
        let p = &self.pairs[i];
        let s = self.lattice.find(&p.set).unwrap();
        let exps: Vec<String> = p.chi.exps().iter().map(u32::to_string).collect();
        format!("H{}#{}:{}[{}]", p.order(), self.lattice.class_of[s], p.chi.order(), exps.join(","))
    }

    /// Pairs with `Z(G) <= H` and `phi` restricting to `phi_bar` on the centre.
    pub fn central_indices(&self, phi_bar: &Pair) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let p = &self.pairs[i];
                phi_bar.set.is_subset(&p.set) && p.restrict(&phi_bar.set).chi == phi_bar.chi
            })
            .collect()
    }

    /// The double coset product of two basis elements.
    pub fn product(&self, i: usize, j: usize) -> Result<BTreeMap<usize, Rational64>> {
        let g = &self.group;
        let (kp, hp) = (&self.pairs[i], &self.pairs[j]);
        let mut out: BTreeMap<usize, Rational64> = BTreeMap::new();
        for &w in &g.double_cosets(&kp.set, &hp.set).reps {
            let wi = g.inv(w);
            // (w^-1 K w) n H with z -> phi(w z w^-1) psi(z)
            let k_w = g.conjugate_set(&kp.set, wi);
            let s = k_w.intersect(&hp.set);
            let l = kp.chi.order() * hp.chi.order();
            let exps = s
                .elems()
                .iter()
                .map(|&z| {
                    let a = kp.value(g.conj(w, z)).unwrap().exp_at(l);
                    let b = hp.value(z).unwrap().exp_at(l);
                    (a + b) % l
                })
                .collect();
            let pair = Pair::new(s, LinearCharacter::from_exps(l, exps));
            *out.entry(self.canonicalize(&pair)?).or_insert_with(Rational64::zero) += Rational64::one();
        }
        Ok(out)
    }

    /// `#{g in H\G/H' : (H, phi) <= (g H' g^-1, phi'(g^-1 - g))}`.
    pub fn form(&self, i: usize, j: usize) -> i64 {
        let (a, b) = (&self.pairs[i], &self.pairs[j]);
        if b.order() % a.order() != 0 {
            return 0;
        }
        let g = &self.group;
        g.double_cosets(&a.set, &b.set)
            .reps
            .iter()
            .filter(|&&x| a.is_subconjugate(g, x, b))
            .count() as i64
    }

    /// The matrix of the form on a list of basis indices.
    pub fn mark_matrix(&self, indices: &[usize]) -> Vec<Vec<i64>> {
        indices
            .par_iter()
            .map(|&i| indices.iter().map(|&j| self.form(i, j)).collect())
            .collect()
    }
}

/// A rational combination of basis pairs of `R_+(G)`.
#[derive(Clone)]
pub struct MonomialSum {
    basis: Arc<PairBasis>,
    terms: BTreeMap<usize, Rational64>,
}

impl std::fmt::Debug for MonomialSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(i, c)| format!("{c}*{}", self.basis.key(*i))).collect();
        write!(f, "MonomialSum[{}]({})", self.basis.group().label(), parts.join(" + "))
    }
}

impl PartialEq for MonomialSum {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) && self.terms == other.terms
    }
}

impl MonomialSum {
    pub fn zero(basis: Arc<PairBasis>) -> Self {
        MonomialSum { basis, terms: BTreeMap::new() }
    }

    pub fn basis_element(basis: Arc<PairBasis>, i: usize) -> Self {
        Self::from_terms(basis, [(i, Rational64::one())])
    }

    /// The class of an arbitrary pair.
    pub fn of_pair(basis: Arc<PairBasis>, pair: &Pair) -> Result<Self> {
        let i = basis.canonicalize(pair)?;
        Ok(Self::basis_element(basis, i))
    }

    pub fn from_terms(basis: Arc<PairBasis>, terms: impl IntoIterator<Item = (usize, Rational64)>) -> Self {
        let mut s = Self::zero(basis);
        for (i, c) in terms {
            s.add_term(i, c);
        }
        s
    }

    pub fn add_term(&mut self, i: usize, c: Rational64) {
        let e = self.terms.entry(i).or_insert_with(Rational64::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn basis(&self) -> &Arc<PairBasis> {
        &self.basis
    }

    pub fn terms(&self) -> &BTreeMap<usize, Rational64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch(
                self.basis.group().label().into(),
                other.basis.group().label().into(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut s = self.clone();
        for (&i, &c) in &other.terms {
            s.add_term(i, c);
        }
        Ok(s)
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Self::from_terms(self.basis.clone(), self.terms.iter().map(|(&i, &c)| (i, c * r)))
    }

    /// Product in `R_+(G)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut s = Self::zero(self.basis.clone());
        for (&i, &a) in &self.terms {
            for (&j, &b) in &other.terms {
                for (k, c) in self.basis.product(i, j)? {
                    s.add_term(k, a * b * c);
                }
            }
        }
        Ok(s)
    }

    /// Image under `b`, the sum of induced characters.
    pub fn b_map(&self) -> ClassFunction {
        let mut acc = ClassFunction::zero(self.basis.group().clone());
        for (&i, &c) in &self.terms {
            acc = acc.add(&self.basis.induced(i).scale(c)).unwrap();
        }
        acc
    }

    /// Total degree of the image under `b`.
    pub fn b_degree(&self) -> Rational64 {
        let g = self.basis.group().order() as i64;
        self.terms
            .iter()
            .map(|(&i, &c)| c * Rational64::from_integer(g / self.basis.pair(i).order() as i64))
            .sum()
    }

    /// Bilinear form value.
    pub fn form(&self, other: &Self) -> Result<Rational64> {
        self.check(other)?;
        let mut acc = Rational64::zero();
        for (&i, &a) in &self.terms {
            for (&j, &b) in &other.terms {
                acc += a * b * Rational64::from_integer(self.basis.form(i, j));
            }
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

/// Result of solving the adjunction system.
#[derive(Clone, Debug)]
pub struct BrauerInduction {
    pub result: MonomialSum,
    /// `b(result) = rho` holds.
    pub reproduces: bool,
    pub integral: bool,
}

/// The unique `a` with `[tau_i, a] = <b(tau_i), rho>` for every basis element
/// `tau_i` in `indices` (all of the basis when `None`).
pub fn brauer_induction(
    basis: &Arc<PairBasis>,
    rho: &ClassFunction,
    indices: Option<&[usize]>,
) -> Result<BrauerInduction> {
    let all: Vec<usize> = (0..basis.len()).collect();
    let idx = indices.unwrap_or(&all);
    let m = basis.mark_matrix(idx);
    let rhs: Vec<Rational64> = idx
        .iter()
        .map(|&i| basis.induced(i).inner(rho).and_then(|c| c.to_rational()))
        .collect::<Result<_>>()?;
    let x = linalg::solve(&m, &rhs)?;
    let result = MonomialSum::from_terms(basis.clone(), idx.iter().copied().zip(x));
    let reproduces = result.b_map() == *rho;
    let integral = result.is_integral();
    Ok(BrauerInduction { result, reproduces, integral })
}

/// Rank and kernel of the form restricted to a set of basis indices.
pub fn mark_rank(basis: &PairBasis, indices: &[usize]) -> (usize, Vec<Vec<Rational64>>) {
    let m = basis.mark_matrix(indices);
    (linalg::rank(&m), linalg::kernel(&m))
}

/// The subgroup `H x K` of a block product, from subsets of the factors.
pub fn product_set(
    target: &Group,
    left: &Group,
    a: &ElemSet,
    right: &Group,
    b: &ElemSet,
) -> Result<Vec<(u32, usize, usize)>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (i, &x) in a.elems().iter().enumerate() {
        for (j, &y) in b.elems().iter().enumerate() {
            let m = crate::matrix::block_embed(&[*left.elem(x), *right.elem(y)])?;
            out.push((target.index_of(&m)?, i, j));
        }
    }
    Ok(out)
}

/// External product `(H x K, phi psi)` in the block product of two groups.
pub fn external_pair(target: &Group, left: &Group, p: &Pair, right: &Group, q: &Pair) -> Result<Pair> {
    let prod = product_set(target, left, &p.set, right, &q.set)?;
    let l = p.chi.order() * q.chi.order();
    let mut elems: Vec<(u32, u32)> = prod
        .into_iter()
        .map(|(z, i, j)| (z, (p.chi.exp_at_level(i, l) + q.chi.exp_at_level(j, l)) % l))
        .collect();
    elems.sort_unstable();
    let set = target.set_from(elems.iter().map(|e| e.0).collect());
    Ok(Pair::new(set, LinearCharacter::from_exps(l, elems.into_iter().map(|e| e.1).collect())))
}

/// One pair `(H, phi)` per conjugacy class with `H` cyclic, found without
/// the subgroup lattice. Ordered by subgroup order descending, then by
/// element list and character.
pub fn cyclic_pair_classes(group: &Group) -> Vec<Pair> {
    let canon_set = |set: &ElemSet| -> ElemSet {
        (0..group.order() as u32).map(|g| group.conjugate_set(set, g)).min().expect("nonempty group")
    };
    let mut subgroups: Vec<ElemSet> =
        group.classes().reps.par_iter().map(|&x| canon_set(&group.closure(&[x]))).collect();
    subgroups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.canonical_cmp(b)));
    subgroups.dedup();
    let mut out = Vec::new();
    for h in subgroups {
        let norm = group.normalizer(&h);
        let mut seen: Vec<Pair> = Vec::new();
        for chi in linear_characters(group, &h) {
            let p = Pair::new(h.clone(), chi);
            let rep = norm.elems().iter().map(|&n| p.conjugate(group, n)).min().expect("normalizer contains 1");
            if !seen.contains(&rep) {
                seen.push(rep);
            }
        }
        seen.sort();
        out.extend(seen);
    }
    out
}
