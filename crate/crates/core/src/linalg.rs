//! Exact linear algebra over the rationals: fraction-free (Bareiss)
//! elimination for square systems, and rank and kernel computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn to_small(x: &BigRational) -> Result<Rational64> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
        _ => Err(Error::Parse(format!("rational {x} does not fit in 64 bits"))),
    }
}

/// Solve `A x = b` for a square integer matrix `A`.
pub fn solve(a: &[Vec<i64>], b: &[Rational64]) -> Result<Vec<Rational64>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let denom = b.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
    // augmented integer matrix
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| {
            assert_eq!(row.len(), n);
            let mut v: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
            v.push(BigInt::from(*r.numer()) * BigInt::from(denom / r.denom()));
            v
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Err(Error::SingularMarks { rank: rank(a), size: n });
        };
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    let scale = BigRational::from_integer(BigInt::from(denom));
    x.iter().map(|v| to_small(&(v / &scale))).collect()
}

fn rref(a: &[Vec<i64>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &[Vec<i64>]) -> usize {
    rref(a).1.len()
}

/// A basis of `{x : A x = 0}`.
pub fn kernel(a: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let cols = a.first().map_or(0, Vec::len);
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            // clear denominators for a tidy integral kernel vector
            let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            v.iter()
                .map(|x| {
                    let y = x * BigRational::from_integer(l.clone());
                    to_small(&y).unwrap_or_else(|_| Rational64::from_integer(if y.is_negative() { -1 } else { 1 }))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn small_systems() {
        let a = vec![vec![2, 1], vec![1, 3]];
        let x = solve(&a, &[r(3), r(5)]).unwrap();
        assert_eq!(x, vec![Rational64::new(4, 5), Rational64::new(7, 5)]);
        // needs a row swap
        let a = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(solve(&a, &[r(7), Rational64::new(1, 2)]).unwrap(), vec![Rational64::new(1, 2), r(7)]);
        let a = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(solve(&a, &[r(1), r(2)]), Err(Error::SingularMarks { rank: 1, size: 2 }));
        assert_eq!(kernel(&a), vec![vec![r(-2), r(1)]]);
    }

    proptest! {
        #[test]
        fn solution_satisfies_system(
            entries in prop::collection::vec(-6i64..7, 16),
            rhs in prop::collection::vec(-9i64..10, 4),
        ) {
            let a: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let b: Vec<Rational64> = rhs.iter().map(|&x| Rational64::new(x, 3)).collect();
            match solve(&a, &b) {
                Ok(x) => {
                    for (row, bi) in a.iter().zip(&b) {
                        let s: Rational64 = row.iter().zip(&x).map(|(&aij, xj)| r(aij) * xj).sum();
                        prop_assert_eq!(s, *bi);
                    }
                }
                Err(_) => prop_assert!(rank(&a) < 4),
            }
        }
    }
}
