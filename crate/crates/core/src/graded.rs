//! Graded rings `R_n = sum R(G(a_1) x ... x G(a_n))` and their monomial
//! analogues, with the product by parabolic induction and the coproduct by
//! unipotent fixed points.
//!
//! Degree tuples may contain zeros; the group of a tuple is the block
//! product over its nonzero parts.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Rational64;

use crate::character::{LinearCharacter, Pair};
use crate::classfn::ClassFunction;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::indmod::{InducedModule, LineSystem};
use crate::matrix::{block_embed, Mat};
use crate::parabolic::Parabolic;
use crate::rplus::{external_pair, MonomialSum};

/// The shuffle `(1, ..., 2n) -> (1, n+1, 2, n+2, ..., n, 2n)`: block `i` of
/// the result is block `forward()[i]` of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleTau {
    n: usize,
}

impl ShuffleTau {
    pub fn new(n: usize) -> Self {
        ShuffleTau { n }
    }

    pub fn forward(&self) -> Vec<usize> {
        (0..self.n).flat_map(|i| [i, self.n + i]).collect()
    }

    pub fn inverse(&self) -> Vec<usize> {
        (0..self.n).map(|i| 2 * i).chain((0..self.n).map(|i| 2 * i + 1)).collect()
    }
}

/// Reorder the entries of a degree tuple: entry `i` is `shape[perm[i]]`.
pub fn permute_shape(shape: &[usize], perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|&i| shape[i]).collect()
}

/// Reorder the diagonal blocks of an element.
pub fn permute_element(m: &Mat, shape: &[usize], perm: &[usize]) -> Result<Mat> {
    let blocks = m.blocks(shape);
    block_embed(&perm.iter().map(|&i| blocks[i]).collect::<Vec<_>>())
}

/// Transport a pair along a block permutation.
pub fn permute_pair(from: &Group, shape: &[usize], perm: &[usize], to: &Group, pair: &Pair) -> Result<Pair> {
    let mut elems: Vec<(u32, u32)> = pair
        .set
        .elems()
        .iter()
        .zip(pair.chi.exps())
        .map(|(&x, &e)| Ok((to.index_of(&permute_element(from.elem(x), shape, perm)?)?, e)))
        .collect::<Result<_>>()?;
    elems.sort_unstable();
    let set = to.set_from(elems.iter().map(|e| e.0).collect());
    Ok(Pair::new(set, LinearCharacter::from_exps(pair.chi.order(), elems.into_iter().map(|e| e.1).collect())))
}

/// `(U L_0, phi . levi)` for a pair `(L_0, phi)` of the Levi.
pub fn inflate_pair(par: &Parabolic, pair: &Pair) -> Pair {
    let g = par.ambient();
    let mut elems: Vec<(u32, u32)> = Vec::with_capacity(par.u().len() * pair.order());
    for &u in par.u().elems() {
        for (&l, &e) in pair.set.elems().iter().zip(pair.chi.exps()) {
            elems.push((g.mul(u, par.embed(l)), e));
        }
    }
    elems.sort_unstable();
    let set = g.set_from(elems.iter().map(|e| e.0).collect());
    Pair::new(set, LinearCharacter::from_exps(pair.chi.order(), elems.into_iter().map(|e| e.1).collect()))
}

/// A Levi pair viewed in the ambient group without the unipotent radical.
pub fn embed_pair(par: &Parabolic, pair: &Pair) -> Pair {
    let g = par.ambient();
    let mut elems: Vec<(u32, u32)> =
        pair.set.elems().iter().zip(pair.chi.exps()).map(|(&l, &e)| (par.embed(l), e)).collect();
    elems.sort_unstable();
    let set = g.set_from(elems.iter().map(|e| e.0).collect());
    Pair::new(set, LinearCharacter::from_exps(pair.chi.order(), elems.into_iter().map(|e| e.1).collect()))
}

fn add_shapes(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn pair_split(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    a.iter().zip(b).map(|(&x, &y)| vec![x, y]).collect()
}

/// All tuples `alpha` with `0 <= alpha_i <= a_i`.
pub fn sub_degrees(a: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &ai in a {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=ai).map(move |x| {
                    let mut v = p.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// An element of `R_n`.
#[derive(Clone, Debug)]
pub struct GradedR {
    pub q: u32,
    pub n: usize,
    pub comps: BTreeMap<Vec<usize>, ClassFunction>,
}

impl PartialEq for GradedR {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.n == other.n && self.comps == other.comps
    }
}

impl GradedR {
    pub fn zero(q: u32, n: usize) -> Self {
        GradedR { q, n, comps: BTreeMap::new() }
    }

    pub fn single(q: u32, degree: Vec<usize>, f: ClassFunction) -> Self {
        let mut x = Self::zero(q, degree.len());
        x.add_component(degree, f).expect("fresh element");
        x
    }

    /// The unit: value 1 in degree `(0, ..., 0)`.
    pub fn unit(ctx: &Context, q: u32, n: usize) -> Result<Self> {
        let g = ctx.group(q, &vec![0; n])?;
        Ok(Self::single(q, vec![0; n], ClassFunction::trivial(g)))
    }

    pub fn add_component(&mut self, degree: Vec<usize>, f: ClassFunction) -> Result<()> {
        if degree.len() != self.n {
            return Err(Error::ShapeMismatch(format!("degree {degree:?} in R_{}", self.n)));
        }
        let v = match self.comps.remove(&degree) {
            Some(old) => old.add(&f)?,
            None => f,
        };
        if !v.is_zero() {
            self.comps.insert(degree, v);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut s = self.clone();
        for (d, f) in &other.comps {
            s.add_component(d.clone(), f.clone())?;
        }
        Ok(s)
    }

    /// Projection to degree zero.
    pub fn counit(&self) -> Option<&ClassFunction> {
        self.comps.get(&vec![0; self.n])
    }
}

/// `Ind_{P}^{G(a+b)} Inf (f x g)` factorwise, after the shuffle.
pub fn m_r(ctx: &Context, x: &GradedR, y: &GradedR) -> Result<GradedR> {
    if x.n != y.n || x.q != y.q {
        return Err(Error::ShapeMismatch(format!("R_{} times R_{}", x.n, y.n)));
    }
    let (q, n) = (x.q, x.n);
    let tau = ShuffleTau::new(n).forward();
    let mut out = GradedR::zero(q, n);
    for (a, f) in &x.comps {
        for (b, g) in &y.comps {
            out.add_component(add_shapes(a, b), m_r_component(ctx, q, a, f, b, g, &tau)?)?;
        }
    }
    Ok(out)
}

fn m_r_component(
    ctx: &Context,
    q: u32,
    a: &[usize],
    f: &ClassFunction,
    b: &[usize],
    g: &ClassFunction,
    tau: &[usize],
) -> Result<ClassFunction> {
    let ab = concat(a, b);
    let ext = f.external_product(g, ctx.group(q, &ab)?)?;
    let shuffled = permute_shape(&ab, tau);
    let moved = ext.permute_blocks(&ab, tau, ctx.group(q, &shuffled)?)?;
    let par = ctx.parabolic(q, &pair_split(a, b))?;
    moved.parabolic_induce(&par)
}

/// `m^*`: every split `alpha <= a` of every component, landing in `R_{2n}`
/// in degree `(alpha, a - alpha)`.
pub fn m_star_r(ctx: &Context, x: &GradedR) -> Result<GradedR> {
    let (q, n) = (x.q, x.n);
    let inv = ShuffleTau::new(n).inverse();
    let mut out = GradedR::zero(q, 2 * n);
    for (a, f) in &x.comps {
        for alpha in sub_degrees(a) {
            let rest: Vec<usize> = a.iter().zip(&alpha).map(|(x, y)| x - y).collect();
            let split = pair_split(&alpha, &rest);
            let fine: Vec<usize> = split.iter().flatten().copied().collect();
            let par = ctx.parabolic(q, &split)?;
            let r = f.hc_restrict(&par)?;
            let degree = permute_shape(&fine, &inv);
            let moved = r.permute_blocks(&fine, &inv, ctx.group(q, &degree)?)?;
            out.add_component(degree, moved)?;
        }
    }
    Ok(out)
}

/// Harish-Chandra restriction along an arbitrary split.
pub fn restrict_split(ctx: &Context, q: u32, f: &ClassFunction, split: &[Vec<usize>]) -> Result<ClassFunction> {
    let par = ctx.parabolic(q, split)?;
    f.hc_restrict(&par)
}

/// An element of `R_{+,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedRPlus {
    pub q: u32,
    pub n: usize,
    pub comps: BTreeMap<Vec<usize>, MonomialSum>,
}

impl GradedRPlus {
    pub fn zero(q: u32, n: usize) -> Self {
        GradedRPlus { q, n, comps: BTreeMap::new() }
    }

    pub fn single(q: u32, degree: Vec<usize>, s: MonomialSum) -> Self {
        let mut x = Self::zero(q, degree.len());
        x.add_component(degree, s).expect("fresh element");
        x
    }

    pub fn add_component(&mut self, degree: Vec<usize>, s: MonomialSum) -> Result<()> {
        if degree.len() != self.n {
            return Err(Error::ShapeMismatch(format!("degree {degree:?} in R+_{}", self.n)));
        }
        let v = match self.comps.remove(&degree) {
            Some(old) => old.add(&s)?,
            None => s,
        };
        if !v.is_zero() {
            self.comps.insert(degree, v);
        }
        Ok(())
    }

    /// Componentwise image under `b`.
    pub fn b_map(&self) -> GradedR {
        GradedR {
            q: self.q,
            n: self.n,
            comps: self
                .comps
                .iter()
                .map(|(d, s)| (d.clone(), s.b_map()))
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }
}

/// Product of two pairs of `G(a)` and `G(b)` (tuples of degrees): the
/// external pair, shuffled, then inflated over `U` (or, when `literal`, left
/// block diagonal).
pub fn m_plus_pair(
    ctx: &Context,
    q: u32,
    a: &[usize],
    p: &Pair,
    b: &[usize],
    r: &Pair,
    literal: bool,
) -> Result<Pair> {
    let n = a.len();
    let ab = concat(a, b);
    let tau = ShuffleTau::new(n).forward();
    let prod = ctx.group(q, &ab)?;
    let (ga, gb) = (ctx.group(q, a)?, ctx.group(q, b)?);
    let ext = external_pair(&prod, &ga, p, &gb, r)?;
    let shuffled = ctx.group(q, &permute_shape(&ab, &tau))?;
    let moved = permute_pair(&prod, &ab, &tau, &shuffled, &ext)?;
    let par = ctx.parabolic(q, &pair_split(a, b))?;
    Ok(if literal { embed_pair(&par, &moved) } else { inflate_pair(&par, &moved) })
}

pub fn m_plus(ctx: &Context, x: &GradedRPlus, y: &GradedRPlus, literal: bool) -> Result<GradedRPlus> {
    if x.n != y.n || x.q != y.q {
        return Err(Error::ShapeMismatch(format!("R+_{} times R+_{}", x.n, y.n)));
    }
    let q = x.q;
    let mut out = GradedRPlus::zero(q, x.n);
    for (a, s) in &x.comps {
        for (b, t) in &y.comps {
            let c = add_shapes(a, b);
            let basis = ctx.basis(q, &c)?;
            let mut acc = MonomialSum::zero(basis.clone());
            for (&i, &ci) in s.terms() {
                for (&j, &cj) in t.terms() {
                    let pair = m_plus_pair(ctx, q, a, s.basis().pair(i), b, t.basis().pair(j), literal)?;
                    acc.add_term(basis.canonicalize(&pair)?, ci * cj);
                }
            }
            out.add_component(c, acc)?;
        }
    }
    Ok(out)
}

/// Line system of a pair of `G(a)` for a split of each block.
pub fn line_system(ctx: &Context, q: u32, a: &[usize], pair: &Pair, split: &[Vec<usize>]) -> Result<LineSystem> {
    let g = ctx.group(q, a)?;
    let module = Arc::new(InducedModule::new(g, pair.clone())?);
    LineSystem::new(module, ctx.parabolic(q, split)?)
}

/// Sum of the Levi orbit pairs of a pair of `G(a)` for a split, transported
/// along `perm` (a permutation of the fine blocks) and canonicalized.
pub fn orbit_pairs(
    ctx: &Context,
    q: u32,
    a: &[usize],
    pair: &Pair,
    split: &[Vec<usize>],
    perm: &[usize],
) -> Result<MonomialSum> {
    let lines = line_system(ctx, q, a, pair, split)?;
    let fine: Vec<usize> = split.iter().flatten().copied().collect();
    let target = permute_shape(&fine, perm);
    let basis = ctx.basis(q, &target)?;
    let levi = lines.parabolic().levi().clone();
    let to = ctx.group(q, &target)?;
    let mut s = MonomialSum::zero(basis.clone());
    for o in lines.orbits() {
        let moved = permute_pair(&levi, &fine, perm, &to, &o.stabilizer)?;
        s.add_term(basis.canonicalize(&moved)?, Rational64::from_integer(1));
    }
    Ok(s)
}

/// `m^*` on `R_+`, through Levi orbits on lines.
pub fn m_star_plus(ctx: &Context, x: &GradedRPlus) -> Result<GradedRPlus> {
    let (q, n) = (x.q, x.n);
    let inv = ShuffleTau::new(n).inverse();
    let mut out = GradedRPlus::zero(q, 2 * n);
    for (a, s) in &x.comps {
        for alpha in sub_degrees(a) {
            let rest: Vec<usize> = a.iter().zip(&alpha).map(|(x, y)| x - y).collect();
            let split = pair_split(&alpha, &rest);
            let fine: Vec<usize> = split.iter().flatten().copied().collect();
            let degree = permute_shape(&fine, &inv);
            let mut acc = MonomialSum::zero(ctx.basis(q, &degree)?);
            for (&i, &c) in s.terms() {
                let part = orbit_pairs(ctx, q, a, s.basis().pair(i), &split, &inv)?;
                acc = acc.add(&part.scale(c))?;
            }
            out.add_component(degree, acc)?;
        }
    }
    Ok(out)
}

/// The three ways of splitting a pair of `G(a)` into `(alpha, beta, gamma)`:
/// first `(alpha + beta, gamma)` then the left factor, first
/// `(alpha, beta + gamma)` then the right factor, and directly.
pub struct Coassociativity {
    pub left: MonomialSum,
    pub right: MonomialSum,
    pub direct: MonomialSum,
}

pub fn coassociativity_plus(ctx: &Context, q: u32, a: usize, pair: &Pair, abc: [usize; 3]) -> Result<Coassociativity> {
    let [al, be, ga] = abc;
    if al + be + ga != a {
        return Err(Error::SplitOutOfRange { alpha: al + be + ga, degree: a });
    }
    let id3 = [0, 1, 2];
    let direct = orbit_pairs(ctx, q, &[a], pair, &[vec![al, be, ga]], &id3)?;
    let two_step = |first: [usize; 2], second: Vec<Vec<usize>>| -> Result<MonomialSum> {
        let mid = orbit_pairs(ctx, q, &[a], pair, &[first.to_vec()], &[0, 1])?;
        let mut acc = MonomialSum::zero(ctx.basis(q, &[al, be, ga])?);
        for (&i, &c) in mid.terms() {
            let part = orbit_pairs(ctx, q, &first, mid.basis().pair(i), &second, &id3)?;
            acc = acc.add(&part.scale(c))?;
        }
        Ok(acc)
    };
    let left = two_step([al + be, ga], vec![vec![al, be], vec![ga]])?;
    let right = two_step([al, be + ga], vec![vec![al], vec![be, ga]])?;
    Ok(Coassociativity { left, right, direct })
}

/// Two routes of the Hopf square on `x in R(G(a))`, `y in R(G(b))`:
/// `m^* m (x, y)` and `m (m^* x, m^* y)` in `R_2`.
pub fn hopf_sides(ctx: &Context, x: &GradedR, y: &GradedR) -> Result<(GradedR, GradedR)> {
    let lhs = m_star_r(ctx, &m_r(ctx, x, y)?)?;
    let rhs = m_r(ctx, &m_star_r(ctx, x)?, &m_star_r(ctx, y)?)?;
    Ok((lhs, rhs))
}

/// Class function of the single-block group `G(a)` viewed in `R_1`.
pub fn degree_one(q: u32, a: usize, f: ClassFunction) -> GradedR {
    GradedR::single(q, vec![a], f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_permutations() {
        let t = ShuffleTau::new(3);
        assert_eq!(t.forward(), vec![0, 3, 1, 4, 2, 5]);
        assert_eq!(t.inverse(), vec![0, 2, 4, 1, 3, 5]);
        let (f, i) = (t.forward(), t.inverse());
        for k in 0..6 {
            assert_eq!(f[i[k]], k);
        }
    }

    #[test]
    fn product_dimension_and_unit() {
        let ctx = Context::default();
        let g1 = ctx.group(3, &[1]).unwrap();
        let sign = {
            let det = g1.generators()[0];
            ClassFunction::from_fn(g1.clone(), |x| {
                if x == g1.identity() {
                    crate::cyclo::Cyclotomic::one(2)
                } else {
                    assert_eq!(x, det);
                    crate::cyclo::Cyclotomic::from_int(-1, 2)
                }
            })
        };
        let x = degree_one(3, 1, sign);
        let prod = m_r(&ctx, &x, &x).unwrap();
        let f = &prod.comps[&vec![2]];
        assert_eq!(f.degree().unwrap(), Rational64::from_integer(4));
        let unit = GradedR::unit(&ctx, 3, 1).unwrap();
        assert_eq!(m_r(&ctx, &unit, &x).unwrap(), x);
        assert_eq!(m_r(&ctx, &x, &unit).unwrap(), x);
    }
}
