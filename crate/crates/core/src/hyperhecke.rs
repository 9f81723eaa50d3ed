//! The hyperHecke algebra of a finite group: triples `[(K, psi), g, (H, phi)]`
//! with `(K, psi) <= (g^-1 H g, g^* phi)`, their normal forms under
//!
//! ```text
//! [(K, psi), g k, (H, phi)] = psi(k^-1) [(K, psi), g, (H, phi)]
//! [(K, psi), h g, (H, phi)] = phi(h^-1) [(K, psi), g, (H, phi)]
//! ```
//!
//! the composition product, the realization as module maps
//! `Ind_K(psi) -> Ind_H(phi)`, `g' (x) v -> g' g^-1 (x) v`, the coproduct
//! read off from lines, and the blockwise join.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::character::Pair;
use crate::cyclo::{Cyclotomic, Root};
use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};
use crate::indmod::{InducedModule, LineSystem, MonomialMap, Vector};
use crate::matrix::block_embed;
use crate::rplus::external_pair;

/// `[(src), g, (tgt)]`, a morphism from `Ind(src)` to `Ind(tgt)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub src: Pair,
    pub g: u32,
    pub tgt: Pair,
}

/// Why a triple is not valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invalidity {
    /// `g k g^-1` is not in `H`.
    Containment { k: u32 },
    /// `psi(k) != phi(g k g^-1)`.
    Character { k: u32, psi: Root, phi: Root },
}

/// `x = h g0 k` with `g0` the least element of `H x K`.
#[derive(Clone, Copy, Debug)]
struct Factor {
    g0: u32,
    h: u32,
    k: u32,
}

#[derive(Debug)]
struct DoubleCosetTable {
    reps: Vec<u32>,
    factor: Vec<Factor>,
}

/// Caches attached to one group: double coset tables and induced modules.
#[derive(Debug)]
pub struct Hecke {
    group: Arc<Group>,
    tables: Mutex<HashMap<(ElemSet, ElemSet), Arc<DoubleCosetTable>>>,
    modules: Mutex<HashMap<Pair, Arc<InducedModule>>>,
}

impl Hecke {
    pub fn new(group: Arc<Group>) -> Self {
        Hecke { group, tables: Mutex::new(HashMap::new()), modules: Mutex::new(HashMap::new()) }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    fn table(&self, h: &ElemSet, k: &ElemSet) -> Arc<DoubleCosetTable> {
        let key = (h.clone(), k.clone());
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return t.clone();
        }
        let g = &self.group;
        let n = g.order();
        let mut factor = vec![Factor { g0: u32::MAX, h: 0, k: 0 }; n];
        let mut reps = Vec::new();
        for x in 0..n as u32 {
            if factor[x as usize].g0 != u32::MAX {
                continue;
            }
            reps.push(x);
            for &hh in h.elems() {
                let hx = g.mul(hh, x);
                for &kk in k.elems() {
                    let y = g.mul(hx, kk) as usize;
                    if factor[y].g0 == u32::MAX {
                        factor[y] = Factor { g0: x, h: hh, k: kk };
                    }
                }
            }
        }
        let t = Arc::new(DoubleCosetTable { reps, factor });
        self.tables.lock().unwrap().insert(key, t.clone());
        t
    }

    /// `Ind_H^G(phi)`, cached per pair.
    pub fn module(&self, pair: &Pair) -> Result<Arc<InducedModule>> {
        if let Some(m) = self.modules.lock().unwrap().get(pair) {
            return Ok(m.clone());
        }
        let m = Arc::new(InducedModule::new(self.group.clone(), pair.clone())?);
        self.modules.lock().unwrap().insert(pair.clone(), m.clone());
        Ok(m)
    }

    /// First `k` in `K` violating `(K, psi) <= (g^-1 H g, g^* phi)`.
    pub fn invalidity(&self, src: &Pair, g: u32, tgt: &Pair) -> Option<Invalidity> {
        let grp = &self.group;
        for (i, &k) in src.set.elems().iter().enumerate() {
            let y = grp.conj(g, k);
            match tgt.value(y) {
                None => return Some(Invalidity::Containment { k }),
                Some(phi) => {
                    let psi = src.chi.root_at(i);
                    if psi != phi {
                        return Some(Invalidity::Character { k, psi, phi });
                    }
                }
            }
        }
        None
    }

    pub fn make(&self, src: &Pair, g: u32, tgt: &Pair) -> Result<Triple> {
        match self.invalidity(src, g, tgt) {
            None => Ok(Triple { src: src.clone(), g, tgt: tgt.clone() }),
            Some(Invalidity::Containment { k }) => {
                Err(Error::InvalidTriple(format!("g k g^-1 not in H for k = {k}, g = {g}")))
            }
            Some(Invalidity::Character { k, psi, phi }) => Err(Error::InvalidTriple(format!(
                "psi(k) = {psi} but phi(g k g^-1) = {phi} for k = {k}, g = {g}"
            ))),
        }
    }

    pub fn identity(&self, pair: &Pair) -> Triple {
        Triple { src: pair.clone(), g: self.group.identity(), tgt: pair.clone() }
    }

    /// `t = scalar * canonical`, with `g` replaced by the least element of
    /// `H g K`.
    pub fn normalize(&self, t: &Triple) -> (Root, Triple) {
        let table = self.table(&t.tgt.set, &t.src.set);
        let f = table.factor[t.g as usize];
        // t.g = h g0 k
        let phi = t.tgt.value(f.h).expect("h in H");
        let psi = t.src.value(f.k).expect("k in K");
        let scalar = phi.inv().mul(psi.inv());
        (scalar, Triple { src: t.src.clone(), g: f.g0, tgt: t.tgt.clone() })
    }

    /// All valid canonical triples from `src` to `tgt`, one per double coset.
    pub fn triples_between(&self, src: &Pair, tgt: &Pair) -> Vec<Triple> {
        let table = self.table(&tgt.set, &src.set);
        table
            .reps
            .iter()
            .filter(|&&g| self.invalidity(src, g, tgt).is_none())
            .map(|&g| Triple { src: src.clone(), g, tgt: tgt.clone() })
            .collect()
    }

    /// `x . y` for `y: K -> H` and `x: H -> J`, unnormalized.
    pub fn compose_raw(&self, x: &Triple, y: &Triple) -> Option<Triple> {
        (x.src == y.tgt).then(|| Triple { src: y.src.clone(), g: self.group.mul(x.g, y.g), tgt: x.tgt.clone() })
    }

    pub fn compose_triples(&self, x: &Triple, y: &Triple) -> Option<(Root, Triple)> {
        self.compose_raw(x, y).map(|t| self.normalize(&t))
    }

    /// `HHElement` of a single triple.
    pub fn element(&self, t: &Triple) -> HHElement {
        let (s, c) = self.normalize(t);
        let mut e = HHElement::zero();
        e.add_term(c, s.to_cyclotomic());
        e
    }

    pub fn compose(&self, x: &HHElement, y: &HHElement) -> HHElement {
        let mut out = HHElement::zero();
        for (tx, cx) in &x.terms {
            for (ty, cy) in &y.terms {
                if let Some((s, t)) = self.compose_triples(tx, ty) {
                    out.add_term(t, &(cx * cy) * &s.to_cyclotomic());
                }
            }
        }
        out
    }

    /// Module map of a triple: column `i` is `k_i g^-1 (x) 1`.
    pub fn map(&self, t: &Triple) -> Result<MonomialMap> {
        let src = self.module(&t.src)?;
        let tgt = self.module(&t.tgt)?;
        let gi = self.group.inv(t.g);
        let cols = src.reps().iter().map(|&k| Some(tgt.vector_of(self.group.mul(k, gi)))).collect();
        Ok(MonomialMap { rows: tgt.dim(), cols })
    }

    /// `action(s) . map = map . action(s)` for the generators `s` of `G`.
    pub fn is_equivariant(&self, t: &Triple) -> Result<bool> {
        let m = self.map(t)?;
        let src = self.module(&t.src)?;
        let tgt = self.module(&t.tgt)?;
        for &s in self.group.generators() {
            if tgt.action(s).compose(&m)? != m.compose(&src.action(s))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The two factors of `[(K, psi), g, (H, phi)] =
    /// [M, g, (H, phi)] . [(K, psi), 1, M]` with `M = (g^-1 H g, g^* phi)`.
    pub fn factorization(&self, t: &Triple) -> Result<(Triple, Triple)> {
        let m = t.tgt.conjugate(&self.group, self.group.inv(t.g));
        let left = self.make(&m, t.g, &t.tgt)?;
        let right = self.make(&t.src, self.group.identity(), &m)?;
        Ok((left, right))
    }
}

/// A finite combination of normalized triples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HHElement {
    terms: BTreeMap<Triple, Cyclotomic>,
}

impl HHElement {
    pub fn zero() -> Self {
        HHElement::default()
    }

    pub fn terms(&self) -> &BTreeMap<Triple, Cyclotomic> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c * t` for an already normalized `t`.
    pub fn add_term(&mut self, t: Triple, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(t.clone()).or_insert_with(|| Cyclotomic::zero(1));
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = HHElement::zero();
        for (t, v) in &self.terms {
            out.add_term(t.clone(), v * c);
        }
        out
    }

    /// The common source and target pairs, if all terms share them.
    pub fn endpoints(&self) -> Option<(&Pair, &Pair)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        it.all(|t| t.src == first.src && t.tgt == first.tgt).then_some((&first.src, &first.tgt))
    }
}

/// A matrix of Levi hyperHecke elements between orbit stabilizer pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HHMatrix {
    /// Stabilizer pairs of the target orbits.
    pub rows: Vec<Pair>,
    /// Stabilizer pairs of the source orbits.
    pub cols: Vec<Pair>,
    pub entries: BTreeMap<(usize, usize), HHElement>,
}

impl HHMatrix {
    pub fn zero(rows: Vec<Pair>, cols: Vec<Pair>) -> Self {
        HHMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn add_entry(&mut self, r: usize, c: usize, e: HHElement) {
        let slot = self.entries.entry((r, c)).or_default();
        *slot = slot.add(&e);
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("hyperHecke matrices of different shape".into()));
        }
        let mut out = self.clone();
        for (&(r, c), e) in &other.entries {
            out.add_entry(r, c, e.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = HHMatrix::zero(self.rows.clone(), self.cols.clone());
        for (&(r, col), e) in &self.entries {
            out.add_entry(r, col, e.scale(c));
        }
        out
    }

    /// `self . rhs` with composition of Levi elements.
    pub fn mul(&self, levi: &Hecke, rhs: &HHMatrix) -> Result<HHMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch("middle stabilizers differ".into()));
        }
        let mut out = HHMatrix::zero(self.rows.clone(), rhs.cols.clone());
        for (&(r, m), x) in &self.entries {
            for (&(m2, c), y) in &rhs.entries {
                if m == m2 {
                    out.add_entry(r, c, levi.compose(x, y));
                }
            }
        }
        Ok(out)
    }
}

/// A source line that is valid while its image is not a valid target line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionGap {
    pub source_line: u32,
    pub image_line: u32,
}

/// The coproduct of a triple, computed from the module map restricted to
/// the valid lines of source and target and projected onto the target lines.
pub fn hh_comul(levi: &Hecke, ambient: &Hecke, x: &Triple, src: &LineSystem, tgt: &LineSystem) -> Result<HHMatrix> {
    check_lines(x, src, tgt)?;
    let map = ambient.map(x)?;
    let par = src.parabolic();
    let lg = par.levi();
    let rows = tgt.orbits().iter().map(|o| o.stabilizer.clone()).collect();
    let cols = src.orbits().iter().map(|o| o.stabilizer.clone()).collect();
    let mut out = HHMatrix::zero(rows, cols);
    for (j1, orbit) in src.orbits().iter().enumerate() {
        let Some((m, c)) = map.cols[orbit.chosen() as usize] else { continue };
        let Some(j2) = tgt.orbit_of(m) else { continue };
        let target = &tgt.orbits()[j2];
        let (l, lambda) = target.transversal[target.position(m).expect("line in its orbit")];
        let t = levi.make(&orbit.stabilizer, lg.inv(l), &target.stabilizer)?;
        let coeff = c.mul(lambda.inv()).to_cyclotomic();
        out.add_entry(j2, j1, levi.element(&t).scale(&coeff));
    }
    Ok(out)
}

/// Coproduct of an element whose terms share source and target.
pub fn hh_comul_element(
    levi: &Hecke,
    ambient: &Hecke,
    x: &HHElement,
    src: &LineSystem,
    tgt: &LineSystem,
) -> Result<HHMatrix> {
    let rows = tgt.orbits().iter().map(|o| o.stabilizer.clone()).collect();
    let cols = src.orbits().iter().map(|o| o.stabilizer.clone()).collect();
    let mut out = HHMatrix::zero(rows, cols);
    for (t, c) in x.terms() {
        out = out.add(&hh_comul(levi, ambient, t, src, tgt)?.scale(c))?;
    }
    Ok(out)
}

fn check_lines(x: &Triple, src: &LineSystem, tgt: &LineSystem) -> Result<()> {
    if src.module().pair() != &x.src || tgt.module().pair() != &x.tgt {
        return Err(Error::ShapeMismatch("line systems do not match the triple".into()));
    }
    Ok(())
}

/// Valid source lines sent outside the valid target lines.
pub fn condition_gaps(ambient: &Hecke, x: &Triple, src: &LineSystem, tgt: &LineSystem) -> Result<Vec<ConditionGap>> {
    check_lines(x, src, tgt)?;
    let map = ambient.map(x)?;
    let mut out = Vec::new();
    for (i, col) in map.cols.iter().enumerate() {
        let (m, _) = col.expect("triple maps are monomial");
        if src.is_valid_line(i as u32) && !tgt.is_valid_line(m) {
            out.push(ConditionGap { source_line: i as u32, image_line: m });
        }
    }
    Ok(out)
}

/// Valid target lines hit from invalid source lines. The expected
/// implication says there are none.
pub fn reverse_gaps(ambient: &Hecke, x: &Triple, src: &LineSystem, tgt: &LineSystem) -> Result<Vec<ConditionGap>> {
    check_lines(x, src, tgt)?;
    let map = ambient.map(x)?;
    let mut out = Vec::new();
    for (i, col) in map.cols.iter().enumerate() {
        let (m, _) = col.expect("triple maps are monomial");
        if !src.is_valid_line(i as u32) && tgt.is_valid_line(m) {
            out.push(ConditionGap { source_line: i as u32, image_line: m });
        }
    }
    Ok(out)
}

fn add_vec(v: &mut Vector, i: u32, c: Cyclotomic) {
    let slot = v.entry(i).or_insert_with(|| Cyclotomic::zero(1));
    *slot += &c;
    if slot.is_zero() {
        v.remove(&i);
    }
}

/// Check that the matrix, realized through the Levi transversals, agrees
/// with the projected module map on every valid source line.
pub fn comul_realizes(
    ambient: &Hecke,
    x: &Triple,
    matrix: &HHMatrix,
    src: &LineSystem,
    tgt: &LineSystem,
) -> Result<bool> {
    check_lines(x, src, tgt)?;
    let map = ambient.map(x)?;
    let par = src.parabolic();
    let lg = par.levi();
    let module = tgt.module();
    for (j1, orbit) in src.orbits().iter().enumerate() {
        for (pos, &m) in orbit.lines.iter().enumerate() {
            let mut expect = Vector::new();
            if let Some((m2, c)) = map.cols[m as usize] {
                if tgt.is_valid_line(m2) {
                    expect.insert(m2, c.to_cyclotomic());
                }
            }
            // e_m = lambda^-1 l . e_chosen
            let (l, lambda) = orbit.transversal[pos];
            let mut got = Vector::new();
            for (&(j2, c2), e) in &matrix.entries {
                if c2 != j1 {
                    continue;
                }
                let chosen = tgt.orbits()[j2].chosen();
                for (t, coeff) in e.terms() {
                    let y = lg.mul(l, lg.inv(t.g));
                    let (row, r) = module.act(par.embed(y), chosen);
                    add_vec(&mut got, row, &(coeff * &r.to_cyclotomic()) * &lambda.inv().to_cyclotomic());
                }
            }
            if got.len() != expect.len() || got.iter().zip(&expect).any(|((a, x), (b, y))| a != b || x != y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Supports of the maps of distinct canonical triples between two fixed
/// pairs are pairwise disjoint, so the maps are linearly independent.
pub fn disjoint_supports(hecke: &Hecke, triples: &[Triple]) -> Result<bool> {
    let mut seen: HashMap<(Pair, Pair, usize, u32), usize> = HashMap::new();
    for (n, t) in triples.iter().enumerate() {
        let m = hecke.map(t)?;
        for (i, col) in m.cols.iter().enumerate() {
            let (r, _) = col.expect("triple maps are monomial");
            if let Some(&prev) = seen.get(&(t.src.clone(), t.tgt.clone(), i, r)) {
                if prev != n {
                    return Ok(false);
                }
            }
            seen.insert((t.src.clone(), t.tgt.clone(), i, r), n);
        }
    }
    Ok(true)
}

/// `[(K x K', psi psi'), (g, g'), (H x H', phi phi')]` in a group containing
/// the block diagonal product.
pub fn join(target: &Hecke, left: &Hecke, x: &Triple, right: &Hecke, y: &Triple) -> Result<Triple> {
    let (tg, lg, rg) = (target.group(), left.group(), right.group());
    let src = external_pair(tg, lg, &x.src, rg, &y.src)?;
    let tgt = external_pair(tg, lg, &x.tgt, rg, &y.tgt)?;
    let g = tg.index_of(&block_embed(&[*lg.elem(x.g), *rg.elem(y.g)])?)?;
    target.make(&src, g, &tgt)
}

pub fn join_elements(target: &Hecke, left: &Hecke, x: &HHElement, right: &Hecke, y: &HHElement) -> Result<HHElement> {
    let mut out = HHElement::zero();
    for (tx, cx) in x.terms() {
        for (ty, cy) in y.terms() {
            let (s, t) = target.normalize(&join(target, left, tx, right, ty)?);
            out.add_term(t, &(cx * cy) * &s.to_cyclotomic());
        }
    }
    Ok(out)
}

/// The product of tuples `x_1 (x) ... (x) x_r` and `y_1 (x) ... (x) y_s`,
/// factorwise. `None` is the zero that the product is defined to be when
/// `r != s`.
pub fn join_tuples(
    targets: &[Arc<Hecke>],
    xs: &[(Arc<Hecke>, HHElement)],
    ys: &[(Arc<Hecke>, HHElement)],
) -> Result<Option<Vec<HHElement>>> {
    if xs.len() != ys.len() {
        return Ok(None);
    }
    if targets.len() != xs.len() {
        return Err(Error::ShapeMismatch(format!("{} targets for {} factors", targets.len(), xs.len())));
    }
    targets
        .iter()
        .zip(xs.iter().zip(ys))
        .map(|(t, ((lh, x), (rh, y)))| join_elements(t, lh, x, rh, y))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// The two routes around the square: compose in each factor then join, and
/// join then compose. `x1 . x2` and `x3 . x4` must be composable.
pub fn square_routes(
    target: &Hecke,
    left: &Hecke,
    right: &Hecke,
    [x1, x2, x3, x4]: [&Triple; 4],
) -> Result<(HHElement, HHElement)> {
    let a = left.compose(&left.element(x1), &left.element(x2));
    let b = right.compose(&right.element(x3), &right.element(x4));
    let route1 = join_elements(target, left, &a, right, &b)?;
    let j13 = target.element(&join(target, left, x1, right, x3)?);
    let j24 = target.element(&join(target, left, x2, right, x4)?);
    let route2 = target.compose(&j13, &j24);
    Ok((route1, route2))
}

/// The module map of a join agrees with the tensor product of the factor
/// maps under `e_i (x) e_j -> (k_i, k'_j) (x) 1`.
pub fn join_map_is_tensor(target: &Hecke, left: &Hecke, x: &Triple, right: &Hecke, y: &Triple) -> Result<bool> {
    let t = join(target, left, x, right, y)?;
    let big = target.map(&t)?;
    let (tg, lg, rg) = (target.group(), left.group(), right.group());
    let (ls, lt) = (left.module(&x.src)?, left.module(&x.tgt)?);
    let (rs, rt) = (right.module(&y.src)?, right.module(&y.tgt)?);
    let (bs, bt) = (target.module(&t.src)?, target.module(&t.tgt)?);
    if bs.dim() != ls.dim() * rs.dim() || bt.dim() != lt.dim() * rt.dim() {
        return Ok(false);
    }
    let iota = |module: &InducedModule, a: u32, b: u32| -> Result<(u32, Root)> {
        let m = block_embed(&[*lg.elem(a), *rg.elem(b)])?;
        Ok(module.vector_of(tg.index_of(&m)?))
    };
    let (lm, rm) = (left.map(x)?, right.map(y)?);
    for (i, &a) in ls.reps().iter().enumerate() {
        for (j, &b) in rs.reps().iter().enumerate() {
            let (col, s) = iota(&bs, a, b)?;
            let (ri, si) = lm.cols[i].expect("monomial");
            let (rj, sj) = rm.cols[j].expect("monomial");
            let (row, s2) = iota(&bt, lt.reps()[ri as usize], rt.reps()[rj as usize])?;
            // big(s e_col) = si sj s2 e_row
            let Some((r, v)) = big.cols[col as usize] else { return Ok(false) };
            if r != row || s.mul(v) != si.mul(sj).mul(s2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::linear_characters;
    use crate::context::Context;
    use crate::indmod::LineSystem;

    fn all_pairs(g: &Group, subgroups: &[ElemSet]) -> Vec<Pair> {
        subgroups
            .iter()
            .flat_map(|h| linear_characters(g, h).into_iter().map(move |c| Pair::new(h.clone(), c)))
            .collect()
    }

    fn gl22() -> (Context, Arc<Hecke>, Vec<Pair>) {
        let ctx = Context::default();
        let g = ctx.group(2, &[2]).unwrap();
        let lat = ctx.lattice(2, &[2]).unwrap();
        let subs = lat.subgroups.clone();
        let pairs = all_pairs(&g, &subs);
        (ctx, Arc::new(Hecke::new(g)), pairs)
    }

    #[test]
    fn identity_and_validity() {
        let (_, hk, pairs) = gl22();
        let g = hk.group().clone();
        for p in &pairs {
            let id = hk.identity(p);
            assert_eq!(hk.map(&id).unwrap(), MonomialMap::identity(g.order() / p.order()));
            let (s, t) = hk.normalize(&id);
            assert_eq!(hk.map(&t).unwrap().scale(s), hk.map(&id).unwrap());
            assert_eq!(hk.normalize(&t), (Root::ONE, t.clone()));
        }
        let one = Pair::trivial_on(g.trivial());
        for p in &pairs {
            for x in 0..g.order() as u32 {
                assert!(hk.make(&one, x, p).is_ok());
            }
        }
        let s3 = g.all();
        let chars = linear_characters(&g, &s3);
        let (a, b) = (Pair::new(s3.clone(), chars[0].clone()), Pair::new(s3, chars[1].clone()));
        assert!(matches!(hk.invalidity(&a, g.identity(), &b), Some(Invalidity::Character { .. })));
    }

    #[test]
    fn relations_hold_for_maps() {
        let (_, hk, pairs) = gl22();
        let g = hk.group().clone();
        for src in &pairs {
            for tgt in &pairs {
                for x in 0..g.order() as u32 {
                    let Ok(t) = hk.make(src, x, tgt) else { continue };
                    let (s, c) = hk.normalize(&t);
                    assert_eq!(hk.map(&t).unwrap(), hk.map(&c).unwrap().scale(s));
                    assert!(hk.is_equivariant(&t).unwrap());
                    let (s2, c2) = hk.normalize(&c);
                    assert!(s2.is_one());
                    assert_eq!(c2, c);
                }
            }
        }
    }

    #[test]
    fn compose_matches_maps() {
        let (_, hk, pairs) = gl22();
        let triples: Vec<Triple> =
            pairs.iter().flat_map(|s| pairs.iter().flat_map(|t| hk.triples_between(s, t))).collect();
        let mut n = 0;
        for x in &triples {
            for y in &triples {
                let Some((s, t)) = hk.compose_triples(x, y) else { continue };
                let lhs = hk.map(x).unwrap().compose(&hk.map(y).unwrap()).unwrap();
                assert_eq!(lhs, hk.map(&t).unwrap().scale(s));
                n += 1;
            }
        }
        assert!(n > 100);
    }

    #[test]
    fn identity_comultiplies_to_identities() {
        let (ctx, hk, pairs) = gl22();
        let par = ctx.parabolic_2(2, 2, 1).unwrap();
        let levi = Hecke::new(par.levi().clone());
        for p in &pairs {
            let ls = LineSystem::new(hk.module(p).unwrap(), par.clone()).unwrap();
            let m = hh_comul(&levi, &hk, &hk.identity(p), &ls, &ls).unwrap();
            assert_eq!(m.entries.len(), ls.orbits().len());
            for (&(r, c), e) in &m.entries {
                assert_eq!(r, c);
                assert_eq!(e, &levi.element(&levi.identity(&ls.orbits()[r].stabilizer)));
            }
            assert!(comul_realizes(&hk, &hk.identity(p), &m, &ls, &ls).unwrap());
        }
    }
}
