//! Small dense matrices over a [`FiniteField`] and the general linear groups
//! they form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FiniteField;

pub const MAX_DIM: usize = 4;

/// Default cap on `|GL_n(F_q)|` for full enumeration.
pub const DEFAULT_ORDER_CAP: usize = 25_000;

/// An `n x n` matrix of field-element indices, row-major. Entries past `n*n`
/// are always zero so the derived ordering is row-major lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: u8,
    e: [u8; MAX_DIM * MAX_DIM],
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.entries())
    }
}

impl Mat {
    pub fn identity(n: usize) -> Mat {
        assert!(n <= MAX_DIM);
        let mut e = [0; MAX_DIM * MAX_DIM];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        Mat { n: n as u8, e }
    }

    pub fn zero(n: usize) -> Mat {
        assert!(n <= MAX_DIM);
        Mat { n: n as u8, e: [0; MAX_DIM * MAX_DIM] }
    }

    /// Build from row-major entries; `entries.len()` must be a square.
    pub fn from_entries(field: &FiniteField, entries: &[u32]) -> Result<Mat> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() {
            return Err(Error::Parse(format!("{} entries is not a square", entries.len())));
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        let mut m = Mat::zero(n);
        for (i, &x) in entries.iter().enumerate() {
            if x >= field.order() {
                return Err(Error::Parse(format!("entry {x} is not a field index")));
            }
            m.e[i] = x as u8;
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Entries row by row, as field element indices.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.dim()).map(|r| (0..self.dim()).map(|c| self.get(r, c)).collect()).collect()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.e[r * self.n as usize + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        let n = self.n as usize;
        self.e[r * n + c] = v;
    }

    pub fn entries(&self) -> &[u8] {
        &self.e[..self.dim() * self.dim()]
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.dim())
    }

    /// Product without dimension checks; callers guarantee matching sizes.
    #[inline]
    pub fn mul_unchecked(&self, other: &Mat, f: &FiniteField) -> Mat {
        let n = self.dim();
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat, f: &FiniteField) -> Result<Mat> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.mul_unchecked(other, f))
    }

    pub fn det(&self, f: &FiniteField) -> u8 {
        let n = self.dim();
        let mut m = *self;
        let mut det = 1u8;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| m.get(r, col) != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j), m.get(piv, j));
                    m.set(col, j, b);
                    m.set(piv, j, a);
                }
                det = f.neg(det);
            }
            let pv = m.get(col, col);
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(col, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    pub fn inv(&self, f: &FiniteField) -> Result<Mat> {
        let n = self.dim();
        let mut a = *self;
        let mut b = Mat::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| a.get(r, col) != 0).ok_or(Error::Singular)?;
            for j in 0..n {
                let (x, y) = (a.get(col, j), a.get(piv, j));
                a.set(col, j, y);
                a.set(piv, j, x);
                let (x, y) = (b.get(col, j), b.get(piv, j));
                b.set(col, j, y);
                b.set(piv, j, x);
            }
            let pinv = f.inv(a.get(col, col)).expect("nonzero pivot");
            for j in 0..n {
                a.set(col, j, f.mul(a.get(col, j), pinv));
                b.set(col, j, f.mul(b.get(col, j), pinv));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, f.sub(a.get(r, j), f.mul(factor, a.get(col, j))));
                    b.set(r, j, f.sub(b.get(r, j), f.mul(factor, b.get(col, j))));
                }
            }
        }
        Ok(b)
    }

    /// The `size x size` diagonal block starting at `offset`.
    pub fn block(&self, offset: usize, size: usize) -> Mat {
        let mut m = Mat::zero(size);
        for i in 0..size {
            for j in 0..size {
                m.set(i, j, self.get(offset + i, offset + j));
            }
        }
        m
    }

    /// Diagonal blocks for a shape (zero-size parts yield `0 x 0` blocks).
    pub fn blocks(&self, shape: &[usize]) -> Vec<Mat> {
        let mut off = 0;
        shape
            .iter()
            .map(|&s| {
                let b = self.block(off, s);
                off += s;
                b
            })
            .collect()
    }

    /// Keep only the diagonal blocks of `shape`, zeroing everything else.
    pub fn block_diagonal_part(&self, shape: &[usize]) -> Mat {
        block_embed(&self.blocks(shape)).expect("blocks fit")
    }
}

/// Block-diagonal matrix with the given diagonal blocks.
pub fn block_embed(blocks: &[Mat]) -> Result<Mat> {
    let n: usize = blocks.iter().map(Mat::dim).sum();
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut m = Mat::zero(n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                m.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.dim();
    }
    Ok(m)
}

/// `prod_{i<n} (q^n - q^i)`.
pub fn gl_order(n: usize, q: u32) -> u128 {
    let q = q as u128;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

/// All of `GL_n(F_q)` in row-major lexicographic order.
pub fn gl_enumerate(f: &FiniteField, n: usize, cap: usize) -> Result<Vec<Mat>> {
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let order = gl_order(n, f.order());
    if order > cap as u128 {
        return Err(Error::OrderCap { order, cap });
    }
    let q = f.order() as usize;
    let cells = n * n;
    let mut out = Vec::with_capacity(order as usize);
    let mut m = Mat::zero(n);
    // odometer over entries, last entry fastest, which is lexicographic order
    loop {
        if m.det(f) != 0 {
            out.push(m);
        }
        let mut i = cells;
        loop {
            if i == 0 {
                debug_assert_eq!(out.len() as u128, order);
                return Ok(out);
            }
            i -= 1;
            if (m.e[i] as usize) + 1 < q {
                m.e[i] += 1;
                break;
            }
            m.e[i] = 0;
        }
    }
}

/// A composition `(a_1, ..., a_r)` of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockShape(Vec<usize>);

impl BlockShape {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&a| a == 0) {
            return Err(Error::ShapeMismatch(format!("{parts:?} has a zero part")));
        }
        Ok(BlockShape(parts))
    }

    /// Drop zero parts of a degree tuple.
    pub fn from_degrees(degrees: &[usize]) -> Self {
        BlockShape(degrees.iter().copied().filter(|&a| a > 0).collect())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    #[test]
    fn products_and_inverses() {
        let f2 = f(2);
        let a = Mat::from_entries(&f2, &[1, 1, 0, 1]).unwrap();
        assert!(a.mul(&a, &f2).unwrap().is_identity());
        assert_eq!(Mat::identity(2).mul(&a, &f2).unwrap(), a);
        let f3 = f(3);
        let d = Mat::from_entries(&f3, &[2, 0, 0, 1]).unwrap();
        assert_eq!(d.inv(&f3).unwrap(), d);
        let s = Mat::from_entries(&f3, &[1, 2, 2, 1]).unwrap();
        assert_eq!(s.inv(&f3), Err(Error::Singular));
        assert!(matches!(a.mul(&Mat::identity(3), &f2), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(gl_enumerate(&f(3), 1, DEFAULT_ORDER_CAP).unwrap().len(), 2);
        assert_eq!(gl_enumerate(&f(2), 2, DEFAULT_ORDER_CAP).unwrap().len(), 6);
        assert_eq!(gl_enumerate(&f(3), 2, DEFAULT_ORDER_CAP).unwrap().len(), 48);
        assert_eq!(gl_enumerate(&f(2), 3, DEFAULT_ORDER_CAP).unwrap().len(), 168);
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(gl_enumerate(&f4, 2, DEFAULT_ORDER_CAP).unwrap().len(), 180);
        assert!(matches!(gl_enumerate(&f(3), 3, 1000), Err(Error::OrderCap { .. })));
        assert_eq!(gl_enumerate(&f(5), 0, 10).unwrap(), vec![Mat::identity(0)]);
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free() {
        let all = gl_enumerate(&f(3), 2, DEFAULT_ORDER_CAP).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn determinant_is_multiplicative() {
        let f3 = f(3);
        let all = gl_enumerate(&f3, 2, DEFAULT_ORDER_CAP).unwrap();
        for a in all.iter().step_by(5) {
            for b in &all {
                let ab = a.mul_unchecked(b, &f3);
                assert_eq!(ab.det(&f3), f3.mul(a.det(&f3), b.det(&f3)));
                assert!(ab.mul_unchecked(&ab.inv(&f3).unwrap(), &f3).is_identity());
            }
        }
    }

    #[test]
    fn block_embedding_is_multiplicative_and_injective() {
        let f3 = f(3);
        let g1 = gl_enumerate(&f3, 1, DEFAULT_ORDER_CAP).unwrap();
        let mut seen = std::collections::HashSet::new();
        for a in &g1 {
            for b in &g1 {
                let m = block_embed(&[*a, *b]).unwrap();
                assert!(seen.insert(m));
                for c in &g1 {
                    for d in &g1 {
                        let lhs = m.mul_unchecked(&block_embed(&[*c, *d]).unwrap(), &f3);
                        let rhs = block_embed(&[a.mul_unchecked(c, &f3), b.mul_unchecked(d, &f3)]).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
        assert_eq!(seen.len(), 4);
        let id1 = Mat::identity(1);
        assert!(block_embed(&[id1, id1]).unwrap().is_identity());
        let m = block_embed(&[Mat::identity(2), Mat::from_entries(&f3, &[2]).unwrap()]).unwrap();
        assert_eq!(m.blocks(&[2, 0, 1]), vec![Mat::identity(2), Mat::identity(0), Mat::from_entries(&f3, &[2]).unwrap()]);
    }

    #[test]
    fn shapes() {
        assert!(BlockShape::new(vec![1, 0]).is_err());
        assert_eq!(BlockShape::from_degrees(&[0, 2, 0, 1]).parts(), &[2, 1]);
        assert_eq!(BlockShape::new(vec![2, 1]).unwrap().total(), 3);
    }
}
