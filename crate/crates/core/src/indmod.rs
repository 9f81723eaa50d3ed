//! Induced modules `Ind_H^G(k_phi)` with basis `g_i (x) 1` over least coset
//! representatives, and the geometry of lines under a parabolic `P = U L`:
//! valid double cosets `U t H`, Levi orbits on lines, stabilizers and the
//! `U`-fixed vectors.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;

use crate::character::{LinearCharacter, Pair};
use crate::classfn::ClassFunction;
use crate::cyclo::{Cyclotomic, Root};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::parabolic::Parabolic;
use crate::rplus::{MonomialSum, PairBasis};

/// A linear map sending each basis vector to a multiple of one basis vector,
/// or to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    pub rows: usize,
    /// Image of column `i`: `(row, scalar)`.
    pub cols: Vec<Option<(u32, Root)>>,
}

impl MonomialMap {
    pub fn identity(n: usize) -> Self {
        MonomialMap { rows: n, cols: (0..n as u32).map(|i| Some((i, Root::ONE))).collect() }
    }

    /// `self . rhs`.
    pub fn compose(&self, rhs: &MonomialMap) -> Result<MonomialMap> {
        if rhs.rows != self.cols.len() {
            return Err(Error::DimensionMismatch(rhs.rows, self.cols.len()));
        }
        let cols = rhs
            .cols
            .iter()
            .map(|c| c.and_then(|(j, s)| self.cols[j as usize].map(|(k, t)| (k, s.mul(t)))))
            .collect();
        Ok(MonomialMap { rows: self.rows, cols })
    }

    pub fn scale(&self, r: Root) -> MonomialMap {
        MonomialMap { rows: self.rows, cols: self.cols.iter().map(|c| c.map(|(j, s)| (j, s.mul(r)))).collect() }
    }

    pub fn trace(&self) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(1);
        for (i, c) in self.cols.iter().enumerate() {
            if let Some((j, s)) = c {
                if *j as usize == i {
                    acc += &s.to_cyclotomic();
                }
            }
        }
        acc
    }
}

/// `Ind_H^G(phi)` with basis indexed by left cosets of `H`.
#[derive(Debug)]
pub struct InducedModule {
    group: Arc<Group>,
    pair: Pair,
    reps: Vec<u32>,
    coset_of: Vec<u32>,
}

impl InducedModule {
    pub fn new(group: Arc<Group>, pair: Pair) -> Result<Self> {
        if !group.is_subgroup(&pair.set) {
            return Err(Error::NotSubgroup(format!("subset of {}", group.label())));
        }
        let (reps, coset_of) = group.left_cosets(&pair.set);
        Ok(InducedModule { group, pair, reps, coset_of })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coset representatives, the basis `g_i (x) 1`.
    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn coset_of(&self, x: u32) -> u32 {
        self.coset_of[x as usize]
    }

    /// `x (x) 1` in the basis: `phi(g_j^-1 x)` times basis vector `j`.
    pub fn vector_of(&self, x: u32) -> (u32, Root) {
        let j = self.coset_of[x as usize];
        let h = self.group.mul(self.group.inv(self.reps[j as usize]), x);
        (j, self.pair.value(h).expect("coset representative"))
    }

    /// `g . (g_i (x) 1)`.
    pub fn act(&self, g: u32, i: u32) -> (u32, Root) {
        self.vector_of(self.group.mul(g, self.reps[i as usize]))
    }

    pub fn action(&self, g: u32) -> MonomialMap {
        MonomialMap { rows: self.dim(), cols: (0..self.dim() as u32).map(|i| Some(self.act(g, i))).collect() }
    }

    /// Action matrices of the generators of `G`.
    pub fn generator_actions(&self) -> Vec<(u32, MonomialMap)> {
        self.group.generators().iter().map(|&g| (g, self.action(g))).collect()
    }

    /// Character read off as traces of the action.
    pub fn character(&self) -> ClassFunction {
        ClassFunction::from_fn(self.group.clone(), |g| self.action(g).trace())
    }
}

/// A sparse vector of the induced module.
pub type Vector = BTreeMap<u32, Cyclotomic>;

fn apply(module: &InducedModule, g: u32, v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (&i, c) in v {
        let (j, r) = module.act(g, i);
        let e = out.entry(j).or_insert_with(|| Cyclotomic::zero(1));
        *e += &(c * &r.to_cyclotomic());
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn hermitian(a: &Vector, b: &Vector) -> Cyclotomic {
    let mut acc = Cyclotomic::zero(1);
    for (i, x) in a {
        if let Some(y) = b.get(i) {
            acc += &(x * &y.conj());
        }
    }
    acc
}

fn scale_vec(v: &Vector, c: &Cyclotomic) -> Vector {
    let mut out: Vector = v.iter().map(|(&i, x)| (i, x * c)).collect();
    out.retain(|_, c| !c.is_zero());
    out
}

fn vec_eq(a: &Vector, b: &Vector) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((i, x), (j, y))| i == j && x == y)
}

/// One double coset `U t H`.
#[derive(Clone, Debug)]
pub struct DoubleCoset {
    pub t: u32,
    /// `phi` is trivial on `t^-1 U t n H`.
    pub valid: bool,
    /// Basis indices of the cosets inside `U t H`, ascending.
    pub lines: Vec<u32>,
    /// For valid `t`, the line vector over basis index `lines[k]` is
    /// `scalars[k]` times that basis vector.
    pub scalars: Vec<Root>,
}

/// A Levi orbit of lines.
#[derive(Clone, Debug)]
pub struct LineOrbit {
    /// Basis indices, ascending; the chosen line is the first.
    pub lines: Vec<u32>,
    /// For each line `m`, a Levi element `l` and `lambda` with
    /// `l . e_chosen = lambda e_m`.
    pub transversal: Vec<(u32, Root)>,
    /// Stabilizer of the chosen line in the Levi, with the scalar character
    /// by which it acts on that line.
    pub stabilizer: Pair,
    /// Double cosets (indices into [`LineSystem::cosets`]) met by the orbit.
    pub cosets: Vec<usize>,
}

impl LineOrbit {
    pub fn chosen(&self) -> u32 {
        self.lines[0]
    }

    pub fn position(&self, m: u32) -> Option<usize> {
        self.lines.binary_search(&m).ok()
    }
}

/// The lines of an induced module relative to a parabolic.
#[derive(Debug)]
pub struct LineSystem {
    module: Arc<InducedModule>,
    par: Arc<Parabolic>,
    cosets: Vec<DoubleCoset>,
    /// Double coset of each basis index.
    coset_index: Vec<u32>,
    orbits: Vec<LineOrbit>,
    /// Orbit of each basis index, `u32::MAX` off the valid lines.
    orbit_of: Vec<u32>,
}

fn character_of(levi: &Group, elems: &[u32], roots: &[Root]) -> Pair {
    let level = roots.iter().fold(1u32, |acc, r| acc.lcm(&r.order()));
    let exps = roots.iter().map(|r| r.exp_at(level)).collect();
    Pair::new(levi.set_from(elems.to_vec()), LinearCharacter::from_exps(level, exps))
}

impl LineSystem {
    pub fn new(module: Arc<InducedModule>, par: Arc<Parabolic>) -> Result<Self> {
        let g = module.group().clone();
        if !Arc::ptr_eq(&g, par.ambient()) && g.label() != par.ambient().label() {
            return Err(Error::AmbientMismatch(g.label().into(), par.ambient().label().into()));
        }
        let pair = module.pair();
        let u = par.u();
        let dc = g.double_cosets(u, &pair.set);
        let mut coset_index = vec![u32::MAX; module.dim()];
        let mut cosets = Vec::with_capacity(dc.reps.len());
        for (ci, &t) in dc.reps.iter().enumerate() {
            let ti = g.inv(t);
            let valid = u.elems().iter().all(|&x| {
                let y = g.mul(g.mul(ti, x), t);
                pair.value(y).is_none_or(|r| r.is_one())
            });
            let mut found: BTreeMap<u32, Root> = BTreeMap::new();
            for &x in u.elems() {
                let (i, r) = module.vector_of(g.mul(x, t));
                found.entry(i).or_insert(r);
            }
            for &i in found.keys() {
                coset_index[i as usize] = ci as u32;
            }
            let (lines, scalars) = found.into_iter().unzip();
            cosets.push(DoubleCoset { t, valid, lines, scalars });
        }

        // Levi orbits on the valid lines
        let levi = par.levi().clone();
        let gens = levi.generators().to_vec();
        let mut orbit_of = vec![u32::MAX; module.dim()];
        let mut orbits = Vec::new();
        let valid_lines: Vec<u32> = {
            let mut v: Vec<u32> = cosets.iter().filter(|c| c.valid).flat_map(|c| c.lines.clone()).collect();
            v.sort_unstable();
            v
        };
        for &m0 in &valid_lines {
            if orbit_of[m0 as usize] != u32::MAX {
                continue;
            }
            let id = orbits.len() as u32;
            let mut reached: BTreeMap<u32, (u32, Root)> = BTreeMap::new();
            reached.insert(m0, (levi.identity(), Root::ONE));
            orbit_of[m0 as usize] = id;
            let mut queue = vec![m0];
            let mut qi = 0;
            while qi < queue.len() {
                let m = queue[qi];
                qi += 1;
                let (lm, lam) = reached[&m];
                for &s in &gens {
                    let (m2, sigma) = module.act(par.embed(s), m);
                    if orbit_of[m2 as usize] == u32::MAX {
                        if coset_index[m2 as usize] == u32::MAX || !cosets[coset_index[m2 as usize] as usize].valid {
                            return Err(Error::ShapeMismatch("Levi moved a valid line off the line set".into()));
                        }
                        orbit_of[m2 as usize] = id;
                        reached.insert(m2, (levi.mul(s, lm), sigma.mul(lam)));
                        queue.push(m2);
                    }
                }
            }
            let mut stab = Vec::new();
            let mut roots = Vec::new();
            for l in 0..levi.order() as u32 {
                let (m, r) = module.act(par.embed(l), m0);
                if m == m0 {
                    stab.push(l);
                    roots.push(r);
                }
            }
            let stabilizer = character_of(&levi, &stab, &roots);
            let mut touched: Vec<usize> = reached.keys().map(|&m| coset_index[m as usize] as usize).collect();
            touched.sort_unstable();
            touched.dedup();
            let (lines, transversal) = reached.into_iter().unzip();
            orbits.push(LineOrbit { lines, transversal, stabilizer, cosets: touched });
        }
        Ok(LineSystem { module, par, cosets, coset_index, orbits, orbit_of })
    }

    pub fn module(&self) -> &Arc<InducedModule> {
        &self.module
    }

    pub fn parabolic(&self) -> &Arc<Parabolic> {
        &self.par
    }

    pub fn cosets(&self) -> &[DoubleCoset] {
        &self.cosets
    }

    pub fn coset_index(&self, basis: u32) -> usize {
        self.coset_index[basis as usize] as usize
    }

    pub fn orbits(&self) -> &[LineOrbit] {
        &self.orbits
    }

    /// Orbit containing a basis index, if it is a valid line.
    pub fn orbit_of(&self, basis: u32) -> Option<usize> {
        let o = self.orbit_of[basis as usize];
        (o != u32::MAX).then_some(o as usize)
    }

    pub fn is_valid_line(&self, basis: u32) -> bool {
        self.orbit_of(basis).is_some()
    }

    pub fn valid_count(&self) -> usize {
        self.cosets.iter().filter(|c| c.valid).count()
    }

    /// Number of lines over valid double cosets.
    pub fn line_count(&self) -> usize {
        self.cosets.iter().filter(|c| c.valid).map(|c| c.lines.len()).sum()
    }

    /// The validity flag is the same for every representative `u t h`.
    pub fn validity_is_well_defined(&self) -> bool {
        let g = self.module.group();
        let pair = self.module.pair();
        let u = self.par.u();
        self.cosets.iter().all(|c| {
            u.elems().iter().all(|&x| {
                pair.set.elems().iter().all(|&h| {
                    let t2 = g.mul(g.mul(x, c.t), h);
                    let ti = g.inv(t2);
                    let valid = u
                        .elems()
                        .iter()
                        .all(|&y| pair.value(g.mul(g.mul(ti, y), t2)).is_none_or(|r| r.is_one()));
                    valid == c.valid
                })
            })
        })
    }

    /// `sum_j [L : G(j)]` over all orbits, from the stabilizer orders.
    pub fn orbit_stabilizer_total(&self) -> usize {
        let l = self.par.levi().order();
        self.orbits.iter().map(|o| l / o.stabilizer.order()).sum()
    }

    /// Orbits whose stabilizer character is nontrivial.
    pub fn nontrivial_stabilizers(&self) -> Vec<usize> {
        (0..self.orbits.len()).filter(|&j| !self.orbits[j].stabilizer.chi.is_trivial()).collect()
    }

    /// `sum_j (G(j), lambda_j)^L` in the monomial ring of the Levi.
    pub fn orbit_sum(&self, basis: &Arc<PairBasis>) -> Result<MonomialSum> {
        let mut s = MonomialSum::zero(basis.clone());
        for o in &self.orbits {
            s.add_term(basis.canonicalize(&o.stabilizer)?, Rational64::from_integer(1));
        }
        Ok(s)
    }

    /// Multiplicity of each conjugacy class of orbits, keyed by basis index.
    pub fn multiplicities(&self, basis: &PairBasis) -> Result<BTreeMap<usize, usize>> {
        let mut out = BTreeMap::new();
        for o in &self.orbits {
            *out.entry(basis.canonicalize(&o.stabilizer)?).or_insert(0) += 1;
        }
        Ok(out)
    }

    /// Levi character of the span of the valid lines.
    pub fn line_span_character(&self) -> ClassFunction {
        let levi = self.par.levi().clone();
        ClassFunction::from_fn(levi, |l| {
            let x = self.par.embed(l);
            let mut acc = Cyclotomic::zero(1);
            for c in self.cosets.iter().filter(|c| c.valid) {
                for &i in &c.lines {
                    let (j, r) = self.module.act(x, i);
                    if j == i {
                        acc += &r.to_cyclotomic();
                    }
                }
            }
            acc
        })
    }

    /// `U` permutes the line vectors of each valid double coset without
    /// scalars.
    pub fn unipotent_acts_by_permutation(&self) -> bool {
        let g = self.module.group();
        self.cosets.iter().filter(|c| c.valid).all(|c| {
            self.par.u().elems().iter().all(|&u| {
                c.lines.iter().zip(&c.scalars).all(|(&i, &ci)| {
                    let (j, r) = self.module.act(u, i);
                    let k = c.lines.binary_search(&j).expect("U preserves U t H");
                    r.mul(ci) == c.scalars[k]
                })
            })
        }) && g.order() > 0
    }

    /// Levi character on the `U`-fixed part of the line span, whose basis is
    /// the sums of the line vectors over each valid double coset.
    pub fn line_span_fixed_character(&self) -> Result<ClassFunction> {
        let levi = self.par.levi().clone();
        let mut values = Vec::with_capacity(levi.classes().len());
        for &l in &levi.classes().reps {
            let x = self.par.embed(l);
            let mut acc = Cyclotomic::zero(1);
            for (ci, c) in self.cosets.iter().enumerate().filter(|(_, c)| c.valid) {
                // l maps the sum over U t H to a multiple of the sum over U t' H
                let mut image: Option<(usize, Root)> = None;
                for (&i, &s) in c.lines.iter().zip(&c.scalars) {
                    let (j, r) = self.module.act(x, i);
                    let cj = self.coset_index(j);
                    let d = &self.cosets[cj];
                    let k = d.lines.binary_search(&j).expect("line index");
                    let lam = r.mul(s).mul(d.scalars[k].inv());
                    match image {
                        None => image = Some((cj, lam)),
                        Some(prev) if prev == (cj, lam) => {}
                        Some(_) => return Err(Error::ShapeMismatch("Levi does not preserve line sums".into())),
                    }
                }
                if let Some((cj, lam)) = image {
                    if cj == ci {
                        acc += &lam.to_cyclotomic();
                    }
                }
            }
            values.push(acc);
        }
        Ok(ClassFunction::new(levi, values))
    }

    /// The vectors `(1/|U|) sum_u u t (x) 1` for every double coset.
    pub fn averaged_vectors(&self) -> Vec<Vector> {
        let g = self.module.group();
        let u = self.par.u();
        let inv = Rational64::new(1, u.len() as i64);
        self.cosets
            .iter()
            .map(|c| {
                let mut v = Vector::new();
                for &x in u.elems() {
                    let (j, r) = self.module.vector_of(g.mul(x, c.t));
                    let e = v.entry(j).or_insert_with(|| Cyclotomic::zero(1));
                    *e += &r.to_cyclotomic();
                }
                let mut v: Vector = v.into_iter().map(|(j, c)| (j, c.scale(inv))).collect();
                v.retain(|_, c| !c.is_zero());
                v
            })
            .collect()
    }
}

/// The `U`-fixed subspace of the whole induced module, built from averaged
/// vectors, with its Levi character.
#[derive(Debug)]
pub struct FixedSubspace {
    /// Double coset index and averaged vector, for the nonzero averages.
    pub basis: Vec<(usize, Vector)>,
    /// Invalid double cosets whose average is nonzero (expected empty).
    pub invalid_nonzero: Vec<usize>,
    /// Valid double cosets whose average vanished (expected empty).
    pub valid_zero: Vec<usize>,
    pub character: ClassFunction,
}

impl FixedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn fixed_subspace(lines: &LineSystem) -> Result<FixedSubspace> {
    let module = lines.module();
    let par = lines.parabolic();
    let avg = lines.averaged_vectors();
    let mut basis = Vec::new();
    let mut invalid_nonzero = Vec::new();
    let mut valid_zero = Vec::new();
    for (ci, v) in avg.into_iter().enumerate() {
        let valid = lines.cosets()[ci].valid;
        match (v.is_empty(), valid) {
            (false, true) => basis.push((ci, v)),
            (false, false) => {
                invalid_nonzero.push(ci);
                basis.push((ci, v));
            }
            (true, true) => valid_zero.push(ci),
            (true, false) => {}
        }
    }
    let pos_of: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(k, (ci, _))| (*ci, k)).collect();
    let levi = par.levi().clone();
    let mut values = Vec::with_capacity(levi.classes().len());
    for &l in &levi.classes().reps {
        let x = par.embed(l);
        let mut acc = Cyclotomic::zero(1);
        for (k, (_, v)) in basis.iter().enumerate() {
            let y = apply(module, x, v);
            let first = *y.keys().next().ok_or_else(|| Error::ShapeMismatch("zero image".into()))?;
            let k2 = *pos_of
                .get(&lines.coset_index(first))
                .ok_or_else(|| Error::ShapeMismatch("image leaves the fixed space".into()))?;
            let target = &basis[k2].1;
            let norm = hermitian(target, target).to_rational()?;
            let c = hermitian(&y, target).scale(Rational64::from_integer(1) / norm);
            if !vec_eq(&y, &scale_vec(target, &c)) {
                return Err(Error::ShapeMismatch("image is not a multiple of a fixed basis vector".into()));
            }
            if k2 == k {
                acc += &c;
            }
        }
        values.push(acc);
    }
    Ok(FixedSubspace { basis, invalid_nonzero, valid_zero, character: ClassFunction::new(levi, values) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;

    #[test]
    fn module_character_and_lines() {
        let ctx = Context::default();
        let g = ctx.group(3, &[2]).unwrap();
        let par = ctx.parabolic_2(3, 2, 1).unwrap();
        let b = par.p().clone();
        // upper triangular Borel
        let m = Arc::new(InducedModule::new(g.clone(), Pair::trivial_on(b)).unwrap());
        assert_eq!(m.dim(), 4);
        assert_eq!(m.character(), ClassFunction::induce_pair(g.clone(), m.pair()));
        let lines = LineSystem::new(m.clone(), par.clone()).unwrap();
        assert_eq!(lines.valid_count(), 2);
        let fixed = fixed_subspace(&lines).unwrap();
        assert_eq!(fixed.dim(), 2);
        let hc = m.character().hc_restrict(&par).unwrap();
        assert_eq!(fixed.character, hc);
        assert_eq!(lines.line_span_fixed_character().unwrap(), hc);
    }

    #[test]
    fn trivial_subgroup_in_gl22() {
        let ctx = Context::default();
        let g = ctx.group(2, &[2]).unwrap();
        let par = ctx.parabolic_2(2, 2, 1).unwrap();
        let m = Arc::new(InducedModule::new(g.clone(), Pair::trivial_on(g.trivial())).unwrap());
        let lines = LineSystem::new(m, par).unwrap();
        assert_eq!(lines.valid_count(), 3);
        assert_eq!(lines.line_count(), 6);
        assert_eq!(lines.orbit_stabilizer_total(), 6);
    }
}
