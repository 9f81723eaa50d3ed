//! Parabolic subgroups `P = U L` of block products of general linear groups.
//!
//! A parabolic is given by a split: each block of the ambient shape is cut
//! into consecutive parts (zero parts allowed). The Levi `L` is the block
//! product over all parts, and `U` consists of the block-unipotent matrices
//! with free entries above the diagonal inside each ambient block.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};
use crate::matrix::Mat;

#[derive(Debug)]
pub struct Parabolic {
    split: Vec<Vec<usize>>,
    ambient: Arc<Group>,
    levi: Arc<Group>,
    u: ElemSet,
    p: ElemSet,
    levi_to_ambient: Vec<u32>,
    /// For elements of `P`, the Levi index of the block-diagonal part.
    levi_part: Vec<u32>,
}

impl Parabolic {
    pub fn new(ambient: Arc<Group>, levi: Arc<Group>, split: Vec<Vec<usize>>, sl_intersect: bool) -> Result<Self> {
        let coarse: Vec<usize> = split.iter().map(|s| s.iter().sum()).collect();
        let n: usize = coarse.iter().sum();
        if ambient.dim() != n || levi.dim() != n {
            return Err(Error::ShapeMismatch(format!("split {split:?} for {} and {}", ambient.label(), levi.label())));
        }
        let field = ambient.field().clone();
        let q = field.order() as u8;

        // fine block of each coordinate and coarse block of each coordinate
        let mut fine_of = Vec::with_capacity(n);
        let mut coarse_of = Vec::with_capacity(n);
        let mut fb = 0;
        for (cb, parts) in split.iter().enumerate() {
            for &a in parts {
                for _ in 0..a {
                    fine_of.push(fb);
                    coarse_of.push(cb);
                }
                fb += 1;
            }
        }
        let free: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| coarse_of[r] == coarse_of[c] && fine_of[r] < fine_of[c])
            .collect();

        let mut u_elems = Vec::new();
        let mut digits = vec![0u8; free.len()];
        loop {
            let mut m = Mat::identity(n);
            for (&(r, c), &d) in free.iter().zip(&digits) {
                m.set(r, c, d);
            }
            if !sl_intersect || m.det(&field) == 1 {
                u_elems.push(ambient.index_of(&m)?);
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        let u = ambient.set_from(u_elems);

        let levi_to_ambient: Vec<u32> =
            levi.elements().iter().map(|m| ambient.index_of(m)).collect::<Result<_>>()?;
        let mut levi_part = vec![u32::MAX; ambient.order()];
        let mut p_elems = Vec::with_capacity(u.len() * levi.order());
        for &x in u.elems() {
            for (li, &l) in levi_to_ambient.iter().enumerate() {
                let y = ambient.mul(x, l);
                levi_part[y as usize] = li as u32;
                p_elems.push(y);
            }
        }
        let p = ambient.set_from(p_elems);
        Ok(Parabolic { split, ambient, levi, u, p, levi_to_ambient, levi_part })
    }

    pub fn split(&self) -> &[Vec<usize>] {
        &self.split
    }

    pub fn fine_shape(&self) -> Vec<usize> {
        self.split.iter().flatten().copied().collect()
    }

    pub fn coarse_shape(&self) -> Vec<usize> {
        self.split.iter().map(|s| s.iter().sum()).collect()
    }

    pub fn ambient(&self) -> &Arc<Group> {
        &self.ambient
    }

    pub fn levi(&self) -> &Arc<Group> {
        &self.levi
    }

    pub fn u(&self) -> &ElemSet {
        &self.u
    }

    pub fn p(&self) -> &ElemSet {
        &self.p
    }

    /// Ambient index of a Levi element.
    pub fn embed(&self, l: u32) -> u32 {
        self.levi_to_ambient[l as usize]
    }

    /// Levi index of the block-diagonal part of an element of `P`.
    pub fn levi_part(&self, x: u32) -> Option<u32> {
        let l = self.levi_part[x as usize];
        (l != u32::MAX).then_some(l)
    }

    /// Levi elements as a subset of the ambient group.
    pub fn levi_in_ambient(&self) -> ElemSet {
        self.ambient.set_from(self.levi_to_ambient.clone())
    }

    /// Ambient index of a Levi element, if `x` lies in the Levi.
    pub fn levi_index(&self, x: u32) -> Option<u32> {
        self.levi_part(x).filter(|&l| self.embed(l) == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    fn make(p: u32, split: Vec<Vec<usize>>) -> Parabolic {
        let f = Arc::new(FiniteField::new(p, 1).unwrap());
        let coarse: Vec<usize> = split.iter().map(|s| s.iter().sum()).collect();
        let fine: Vec<usize> = split.iter().flatten().copied().collect();
        let g = Arc::new(Group::block_product(f.clone(), &coarse, 25_000).unwrap());
        let l = Arc::new(Group::block_product(f, &fine, 25_000).unwrap());
        Parabolic::new(g, l, split, false).unwrap()
    }

    #[test]
    fn parabolic_orders() {
        let par = make(3, vec![vec![1, 1]]);
        assert_eq!((par.u().len(), par.levi().order(), par.p().len()), (3, 4, 12));
        let par = make(2, vec![vec![1, 1]]);
        assert_eq!(par.p().len(), 2);
        let par = make(2, vec![vec![1, 2]]);
        assert_eq!(par.u().len(), 4);
        let par = make(2, vec![vec![1, 1, 1]]);
        assert_eq!(par.u().len(), 8);
        let par = make(3, vec![vec![1, 0], vec![1]]);
        assert_eq!(par.u().len(), 1);
        assert_eq!(par.p().len(), 4);
    }

    #[test]
    fn unique_factorization() {
        let par = make(3, vec![vec![1, 1]]);
        let g = par.ambient();
        let levi = par.levi_in_ambient();
        assert_eq!(par.u().intersect(&levi).len(), 1);
        assert!(g.is_subgroup(par.p()));
        for &x in par.p().elems() {
            let l = par.embed(par.levi_part(x).unwrap());
            let u = g.mul(x, g.inv(l));
            assert!(par.u().contains(u));
            // U is normal in P
            for &y in par.u().elems() {
                assert!(par.u().contains(g.conj(x, y)));
            }
        }
    }
}
