//! Class functions with exact cyclotomic values.

use std::sync::Arc;

use num_rational::Rational64;

use crate::character::Pair;
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};
use crate::matrix::{block_embed, Mat};
use crate::parabolic::Parabolic;

#[derive(Clone)]
pub struct ClassFunction {
    group: Arc<Group>,
    /// One value per conjugacy class, in the group's class order.
    values: Vec<Cyclotomic>,
}

impl std::fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClassFunction({}, {:?})", self.group.label(), self.values)
    }
}

fn same_group(a: &Group, b: &Group) -> Result<()> {
    if std::ptr::eq(a, b) || (a.label() == b.label() && a.order() == b.order()) {
        Ok(())
    } else {
        Err(Error::AmbientMismatch(a.label().into(), b.label().into()))
    }
}

impl ClassFunction {
    pub fn new(group: Arc<Group>, values: Vec<Cyclotomic>) -> Self {
        assert_eq!(values.len(), group.classes().len());
        let n = group.exponent();
        let values = values
            .into_iter()
            .map(|v| if n % v.level() == 0 { v.coerce(n) } else { v })
            .collect();
        ClassFunction { group, values }
    }

    /// Evaluate `f` on class representatives.
    pub fn from_fn(group: Arc<Group>, f: impl Fn(u32) -> Cyclotomic) -> Self {
        let values = group.classes().reps.iter().map(|&x| f(x)).collect();
        Self::new(group, values)
    }

    pub fn zero(group: Arc<Group>) -> Self {
        let n = group.exponent();
        Self::from_fn(group, |_| Cyclotomic::zero(n))
    }

    pub fn trivial(group: Arc<Group>) -> Self {
        let n = group.exponent();
        Self::from_fn(group, |_| Cyclotomic::one(n))
    }

    pub fn regular(group: Arc<Group>) -> Self {
        let n = group.exponent();
        let id = group.identity();
        let order = group.order() as i64;
        Self::from_fn(group, |x| Cyclotomic::from_int(if x == id { order } else { 0 }, n))
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    pub fn at(&self, x: u32) -> &Cyclotomic {
        &self.values[self.group.class_of(x)]
    }

    /// Value at the identity, which is the degree of a character.
    pub fn degree(&self) -> Result<Rational64> {
        self.at(self.group.identity()).to_rational()
    }

    fn zip(&self, other: &Self, f: impl Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self::new(self.group.clone(), values))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// Pointwise product, the character of the tensor product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Self::new(self.group.clone(), self.values.iter().map(|v| v.scale(r)).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.group.clone(), self.values.iter().map(Cyclotomic::conj).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Cyclotomic::is_zero)
    }

    /// `(1/|G|) sum_g f1(g) conj(f2(g))`.
    pub fn inner(&self, other: &Self) -> Result<Cyclotomic> {
        same_group(&self.group, &other.group)?;
        let classes = self.group.classes();
        let mut acc = Cyclotomic::zero(self.group.exponent());
        for (c, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let term = (a * &b.conj()).scale(Rational64::from_integer(classes.size(c) as i64));
            acc += &term;
        }
        Ok(acc.scale(Rational64::new(1, self.group.order() as i64)))
    }

    /// Values on the elements of a subset, in its sorted order.
    pub fn restrict(&self, set: &ElemSet) -> Vec<Cyclotomic> {
        set.elems().iter().map(|&x| self.at(x).clone()).collect()
    }

    /// `Ind_H^G f` for `f` given on the elements of `H`:
    /// `|C_G(g)|/|H| * sum_{h in H, h ~ g} f(h)`.
    pub fn induce(group: Arc<Group>, h: &ElemSet, f: impl Fn(usize, u32) -> Cyclotomic) -> Self {
        let classes = group.classes();
        let n = group.exponent();
        let mut sums: Vec<Cyclotomic> = vec![Cyclotomic::zero(n); classes.len()];
        for (pos, &x) in h.elems().iter().enumerate() {
            let c = group.class_of(x);
            sums[c] += &f(pos, x);
        }
        let values = sums
            .into_iter()
            .enumerate()
            .map(|(c, s)| {
                let centralizer = group.order() / classes.size(c);
                s.scale(Rational64::new(centralizer as i64, h.len() as i64))
            })
            .collect();
        Self::new(group, values)
    }

    /// The induced character `Ind_H^G(phi)`.
    pub fn induce_pair(group: Arc<Group>, pair: &Pair) -> Self {
        let classes = group.classes();
        let n = group.exponent();
        // count roots of unity per class at level n
        let mut counts: Vec<Vec<i64>> = vec![Vec::new(); classes.len()];
        for (pos, &x) in pair.set.elems().iter().enumerate() {
            let c = group.class_of(x);
            if counts[c].is_empty() {
                counts[c] = vec![0; n as usize];
            }
            counts[c][pair.chi.exp_at_level(pos, n) as usize] += 1;
        }
        let values = counts
            .into_iter()
            .enumerate()
            .map(|(c, cnt)| {
                if cnt.is_empty() {
                    return Cyclotomic::zero(n);
                }
                let centralizer = group.order() / classes.size(c);
                Cyclotomic::from_counts(&cnt, 1)
                    .scale(Rational64::new(centralizer as i64, pair.order() as i64))
            })
            .collect();
        Self::new(group, values)
    }

    /// Harish-Chandra restriction to the Levi of `par`:
    /// `l -> (1/|U|) sum_u chi(l u)`, the character of the `U`-fixed vectors.
    pub fn hc_restrict(&self, par: &Parabolic) -> Result<Self> {
        same_group(&self.group, par.ambient())?;
        let g = &self.group;
        let u = par.u();
        let scale = Rational64::new(1, u.len() as i64);
        Ok(Self::from_fn(par.levi().clone(), |l| {
            let x = par.embed(l);
            let mut acc = Cyclotomic::zero(g.exponent());
            for &y in u.elems() {
                acc += self.at(g.mul(x, y));
            }
            acc.scale(scale)
        }))
    }

    /// Parabolic induction `Ind_P^G Inf_L^P f` of a class function on the Levi.
    pub fn parabolic_induce(&self, par: &Parabolic) -> Result<Self> {
        same_group(&self.group, par.levi())?;
        let g = par.ambient().clone();
        Ok(Self::induce(g, par.p(), |_, x| self.at(par.levi_part(x).expect("element of P")).clone()))
    }

    /// `f x f'` on a block product whose blocks are those of `f` followed by
    /// those of `f'`.
    pub fn external_product(&self, other: &Self, target: Arc<Group>) -> Result<Self> {
        let (d1, d2) = (self.group.dim(), other.group.dim());
        if target.dim() != d1 + d2 {
            return Err(Error::ShapeMismatch(format!(
                "{} x {} into {}",
                self.group.label(),
                other.group.label(),
                target.label()
            )));
        }
        let mut values = Vec::with_capacity(target.classes().len());
        for &z in &target.classes().reps {
            let m = target.elem(z);
            let a = self.group.index_of(&m.block(0, d1))?;
            let b = other.group.index_of(&m.block(d1, d2))?;
            values.push(self.at(a) * other.at(b));
        }
        Ok(Self::new(target, values))
    }

    /// Reorder diagonal blocks: `shape` lists the block sizes of this group
    /// (zeros allowed) and block `i` of `target` is block `perm[i]` here.
    pub fn permute_blocks(&self, shape: &[usize], perm: &[usize], target: Arc<Group>) -> Result<Self> {
        if shape.iter().sum::<usize>() != self.group.dim() || perm.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!("{shape:?} for {}", self.group.label())));
        }
        let tshape: Vec<usize> = perm.iter().map(|&i| shape[i]).collect();
        let mut values = Vec::with_capacity(target.classes().len());
        for &z in &target.classes().reps {
            let tb = target.elem(z).blocks(&tshape);
            let mut sb = vec![Mat::identity(0); shape.len()];
            for (i, &p) in perm.iter().enumerate() {
                sb[p] = tb[i];
            }
            let x = self.group.index_of(&block_embed(&sb)?)?;
            values.push(self.at(x).clone());
        }
        Ok(Self::new(target, values))
    }

    /// Transport along a bijection of groups: `result(y) = self(phi(y))` where
    /// `phi` maps elements of `target` to elements of this group.
    pub fn pull_back(&self, target: Arc<Group>, phi: impl Fn(u32) -> u32) -> Self {
        Self::from_fn(target, |y| self.at(phi(y)).clone())
    }
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group).is_ok() && self.values == other.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::linear_characters;
    use crate::field::FiniteField;

    fn gl(n: usize, p: u32) -> Arc<Group> {
        Arc::new(Group::gl(Arc::new(FiniteField::new(p, 1).unwrap()), n, 25_000).unwrap())
    }

    #[test]
    fn induction_basics() {
        let c2 = gl(1, 3);
        let reg = ClassFunction::induce_pair(c2.clone(), &Pair::trivial_on(c2.trivial()));
        assert_eq!(reg, ClassFunction::regular(c2.clone()));
        assert_eq!(reg.values()[0], Cyclotomic::from_int(2, 1));

        let g = gl(2, 2);
        let triv = ClassFunction::trivial(g.clone());
        assert_eq!(triv.inner(&triv).unwrap(), Cyclotomic::one(1));
        assert_eq!(ClassFunction::regular(g.clone()).inner(&triv).unwrap(), Cyclotomic::one(1));
        let whole = Pair::trivial_on(g.all());
        assert_eq!(ClassFunction::induce_pair(g.clone(), &whole), triv);
    }

    #[test]
    fn induce_matches_generic_formula() {
        let g = gl(2, 3);
        let h = g.closure(&[3, 10]);
        for chi in linear_characters(&g, &h) {
            let pair = Pair::new(h.clone(), chi);
            let a = ClassFunction::induce_pair(g.clone(), &pair);
            let b = ClassFunction::induce(g.clone(), &h, |pos, _| pair.chi.root_at(pos).to_cyclotomic());
            assert_eq!(a, b);
            assert_eq!(a.degree().unwrap(), Rational64::from_integer((g.order() / h.len()) as i64));
        }
    }
}
