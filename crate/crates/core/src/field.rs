//! Finite fields of small order, stored as full addition and multiplication
//! tables over element indices `0..q`.
//!
//! For `q = p` the index is the residue. For `q = p^k` with `k > 1` the index
//! of `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` is `c_0 + c_1 p + ... `, reduced
//! modulo one of the fixed irreducible polynomials below.

use crate::error::{Error, Result};

/// Default cap on `q`.
pub const DEFAULT_FIELD_CAP: u32 = 16;

/// Coefficients (constant term first, monic leading term omitted) of the
/// irreducible polynomial used for each supported non-prime order.
fn conway_tail(p: u32, k: u32) -> Option<&'static [u32]> {
    match (p, k) {
        // x^2 + x + 1
        (2, 2) => Some(&[1, 1]),
        // x^3 + x + 1
        (2, 3) => Some(&[1, 1, 0]),
        // x^4 + x + 1
        (2, 4) => Some(&[1, 1, 0, 0]),
        // x^2 + 1
        (3, 2) => Some(&[1, 0]),
        _ => None,
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    generator: u8,
    /// Discrete logarithm to base `generator`; entry 0 unused.
    log: Vec<u32>,
}

impl FiniteField {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        Self::with_cap(p, k, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u32, k: u32, cap: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::UnsupportedField(1));
        }
        let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if order > cap as u64 || order > 256 {
            return Err(Error::FieldCap { order, cap });
        }
        let q = order as u32;
        let tail: &[u32] = if k == 1 {
            &[]
        } else {
            conway_tail(p, k).ok_or(Error::UnsupportedField(order))?
        };

        let digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            let mut x = x;
            for _ in 0..k {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let undigits = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };

        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s) as u8;

                // schoolbook product, then reduce x^j for j >= k using the tail
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (k as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    // x^k = -tail(x)
                    for (i, t) in tail.iter().enumerate() {
                        let idx = deg - k as usize + i;
                        prod[idx] = (prod[idx] + c * (p - t % p)) % p;
                    }
                }
                mul[(a * q + b) as usize] = undigits(&prod[..k as usize]) as u8;
            }
        }

        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u8;
                }
                if a != 0 && mul[a * qs + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }

        let mut field = FiniteField {
            p,
            k,
            q,
            add,
            mul,
            neg,
            inv,
            generator: 1,
            log: vec![0; qs],
        };
        let generator = (1..q)
            .find(|&g| field.mult_order(g as u8) == q - 1)
            .expect("multiplicative group of a finite field is cyclic") as u8;
        field.generator = generator;
        let mut x = 1u8;
        for e in 0..q - 1 {
            field.log[x as usize] = e;
            x = field.mul(x, generator);
        }
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn generator(&self) -> u8 {
        self.generator
    }

    /// Exponent `e` with `generator^e = a`, for nonzero `a`.
    pub fn log(&self, a: u8) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    fn mult_order(&self, a: u8) -> u32 {
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
            if n > self.q {
                return 0;
            }
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &FiniteField) {
        let q = f.order() as u8;
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, k) in [(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (2, 2), (2, 3), (3, 2), (2, 4)] {
            let f = FiniteField::new(p, k).unwrap();
            assert_eq!(f.order(), p.pow(k));
            check_axioms(&f);
        }
    }

    #[test]
    fn small_examples() {
        let f2 = FiniteField::new(2, 1).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f3 = FiniteField::new(3, 1).unwrap();
        assert_eq!(f3.mul(2, 2), 1);
        // index 2 is x; x*x = x + 1 = index 3
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(f4.mul(2, 2), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FiniteField::new(4, 1), Err(Error::NotPrime(4)));
        assert!(matches!(FiniteField::new(2, 5), Err(Error::FieldCap { .. })));
        assert!(matches!(FiniteField::new(5, 2), Err(Error::FieldCap { .. })));
        assert!(matches!(
            FiniteField::with_cap(5, 2, 25),
            Err(Error::UnsupportedField(25))
        ));
    }

    #[test]
    fn discrete_log_roundtrip() {
        let f = FiniteField::new(3, 2).unwrap();
        let mut x = 1u8;
        for e in 0..8 {
            assert_eq!(f.log(x), Some(e));
            x = f.mul(x, f.generator());
        }
        assert_eq!(x, 1);
    }
}
