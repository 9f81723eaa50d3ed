//! Exact elements of the cyclotomic field `Q(zeta_N)`.
//!
//! A value is stored as rational coefficients of `1, z, ..., z^{N-1}` with
//! `z^N = 1`. The representation is not unique; the normal form is the
//! remainder modulo the cyclotomic polynomial `Phi_N`, and equality compares
//! normal forms.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `Phi_n` as integer coefficients, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n > 0);
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}
    let mut num = vec![1i64];
    let mut den = vec![1i64];
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mut f = vec![0i64; d as usize + 1];
        f[0] = -1;
        f[d as usize] = 1;
        match mobius(n / d) {
            1 => num = poly_mul(&num, &f),
            -1 => den = poly_mul(&den, &f),
            _ => {}
        }
    }
    // den is monic up to sign
    if den[den.len() - 1] == -1 {
        den.iter_mut().for_each(|c| *c = -*c);
        num.iter_mut().for_each(|c| *c = -*c);
    }
    exact_div(&num, &den)
}

fn mobius(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Quotient of integer polynomials when the divisor is monic and divides exactly.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

#[derive(Clone)]
pub struct Cyclotomic {
    level: u32,
    coeffs: Vec<Rational64>,
}

impl Cyclotomic {
    pub fn zero(level: u32) -> Self {
        assert!(level > 0);
        Cyclotomic { level, coeffs: vec![Rational64::zero(); level as usize] }
    }

    pub fn one(level: u32) -> Self {
        Self::from_rational(Rational64::one(), level)
    }

    pub fn from_int(v: i64, level: u32) -> Self {
        Self::from_rational(Rational64::from_integer(v), level)
    }

    pub fn from_rational(v: Rational64, level: u32) -> Self {
        let mut c = Self::zero(level);
        c.coeffs[0] = v;
        c
    }

    /// `zeta_level^exp`.
    pub fn root(exp: i64, level: u32) -> Self {
        let mut c = Self::zero(level);
        c.coeffs[exp.rem_euclid(level as i64) as usize] = Rational64::one();
        c
    }

    /// `sum_e counts[e] zeta_level^e`, divided by `denom`.
    pub fn from_counts(counts: &[i64], denom: i64) -> Self {
        let level = counts.len() as u32;
        let d = Rational64::from_integer(denom);
        Cyclotomic {
            level,
            coeffs: counts.iter().map(|&c| Rational64::from_integer(c) / d).collect(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Re-express at a multiple of the current level.
    pub fn coerce(&self, level: u32) -> Self {
        assert!(level % self.level == 0, "level {} does not divide {}", self.level, level);
        if level == self.level {
            return self.clone();
        }
        let step = (level / self.level) as usize;
        let mut out = Self::zero(level);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * step] = *c;
        }
        out
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.level == b.level {
            return (a.clone(), b.clone());
        }
        let l = a.level.lcm(&b.level);
        (a.coerce(l), b.coerce(l))
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.level as usize;
        let mut out = Self::zero(self.level);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - i) % n] = *c;
        }
        out
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Cyclotomic { level: self.level, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Remainder modulo `Phi_level`, of length `phi(level)`.
    pub fn normal_form(&self) -> Vec<Rational64> {
        let phi = cyclotomic_polynomial(self.level);
        let deg = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for i in (deg..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            for (j, &p) in phi.iter().enumerate() {
                rem[i - deg + j] -= c * Rational64::from_integer(p);
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form().iter().all(Zero::is_zero)
    }

    /// The rational value, if this element is rational.
    pub fn to_rational(&self) -> Result<Rational64> {
        let nf = self.normal_form();
        if nf.iter().skip(1).all(Zero::is_zero) {
            Ok(nf.first().copied().unwrap_or_else(Rational64::zero))
        } else {
            Err(Error::NotRational)
        }
    }

    /// This value written at level `d`, if it lies in `Q(zeta_d)`.
    pub fn try_at_level(&self, d: u32) -> Option<Cyclotomic> {
        if d % self.level == 0 {
            return Some(self.coerce(d));
        }
        let l = self.level.lcm(&d);
        let target = self.coerce(l).normal_form();
        let phi_d = cyclotomic_polynomial(d).len() - 1;
        let step = (l / d) as i64;
        // columns: normal forms of zeta_d^i at level l
        let cols: Vec<Vec<Rational64>> = (0..phi_d)
            .map(|i| Cyclotomic::root(i as i64 * step, l).normal_form())
            .collect();
        let rows = target.len();
        let mut m: Vec<Vec<Rational64>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational64> = cols.iter().map(|c| c[r]).collect();
                row.push(target[r]);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..phi_d {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                *x *= inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c];
                    for j in 0..=phi_d {
                        let v = m[r][j] * f;
                        m[i][j] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if m[r..].iter().any(|row| !row[phi_d].is_zero()) {
            return None;
        }
        let mut out = Cyclotomic::zero(d);
        for (i, &c) in pivots.iter().enumerate() {
            out.coeffs[c] = m[i][phi_d];
        }
        Some(out)
    }

    /// The smallest level at which this value can be written, with its
    /// normal form there. Two values are equal iff these agree.
    pub fn canonical(&self) -> (u32, Vec<Rational64>) {
        for d in 1..=self.level {
            if self.level % d != 0 {
                continue;
            }
            if let Some(y) = self.try_at_level(d) {
                return (d, y.normal_form());
            }
        }
        unreachable!("every value lies in its own level")
    }

    /// Raw coefficients of `1, z, ..., z^{N-1}` (not normalized).
    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        (&a - &b).normal_form().iter().all(Zero::is_zero)
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        if self.level == rhs.level {
            for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        let n = a.level as usize;
        let mut out = Cyclotomic::zero(a.level);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out.coeffs[(i + j) % n] += x * y;
            }
        }
        out
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (level, nf) = self.canonical();
        let mut terms = Vec::new();
        for (i, c) in nf.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*z{level}"),
                _ => format!("{c}*z{level}^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// A root of unity `exp(2 pi i e / n)`, kept with `e/n` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    n: u32,
    e: u32,
}

impl Root {
    pub const ONE: Root = Root { n: 1, e: 0 };

    pub fn new(e: i64, n: u32) -> Root {
        assert!(n > 0);
        let e = e.rem_euclid(n as i64) as u32;
        let g = e.gcd(&n);
        if e == 0 {
            return Root::ONE;
        }
        Root { n: n / g, e: e / g }
    }

    /// Order of the root.
    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn exp(&self) -> u32 {
        self.e
    }

    /// Exponent at a level divisible by the order.
    pub fn exp_at(&self, level: u32) -> u32 {
        assert!(level % self.n == 0);
        self.e * (level / self.n)
    }

    pub fn mul(self, other: Root) -> Root {
        let l = self.n.lcm(&other.n);
        Root::new(self.exp_at(l) as i64 + other.exp_at(l) as i64, l)
    }

    pub fn inv(self) -> Root {
        Root::new(-(self.e as i64), self.n)
    }

    pub fn is_one(&self) -> bool {
        self.e == 0
    }

    pub fn to_cyclotomic(self) -> Cyclotomic {
        Cyclotomic::root(self.e as i64, self.n)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.e, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(24).len(), 9);
    }

    #[test]
    fn root_identities() {
        let z4 = Cyclotomic::root(1, 4);
        assert_eq!(&z4 * &z4, Cyclotomic::from_int(-1, 4));
        let s = &Cyclotomic::root(1, 3) + &Cyclotomic::root(2, 3);
        assert_eq!(s, Cyclotomic::from_int(-1, 1));
        assert_eq!(s.to_rational().unwrap(), Rational64::from_integer(-1));
        assert_eq!(Cyclotomic::root(1, 6).coerce(12), Cyclotomic::root(2, 12));
        assert_eq!(Cyclotomic::root(1, 6), Cyclotomic::root(2, 12));
        assert_eq!(Cyclotomic::root(1, 4).to_rational(), Err(Error::NotRational));
    }

    #[test]
    fn canonical_level() {
        assert_eq!(Cyclotomic::root(3, 12).canonical().0, 4);
        assert_eq!(Cyclotomic::from_int(5, 24).canonical(), (1, vec![Rational64::from_integer(5)]));
        assert_eq!(format!("{}", Cyclotomic::root(6, 12)), "-1");
        // zeta_3 written at level 6 has a normal form with an odd exponent
        let z3 = Cyclotomic::root(2, 6);
        assert_eq!(z3.canonical(), Cyclotomic::root(1, 3).canonical());
        assert_eq!(z3.try_at_level(3), Some(Cyclotomic::root(1, 3)));
        assert_eq!(Cyclotomic::root(1, 4).try_at_level(2), None);
        let x = &Cyclotomic::root(1, 5) + &Cyclotomic::root(4, 5);
        assert_eq!(x.coerce(20).canonical().0, 5);
    }

    #[test]
    fn roots() {
        let a = Root::new(3, 12);
        assert_eq!(a, Root::new(1, 4));
        assert_eq!(a.mul(a.inv()), Root::ONE);
        assert_eq!(Root::new(1, 6).mul(Root::new(1, 3)), Root::new(1, 2));
        assert_eq!(a.to_cyclotomic(), Cyclotomic::root(3, 12));
    }

    #[test]
    fn conjugation() {
        let z = Cyclotomic::root(1, 8);
        assert_eq!(&z * &z.conj(), Cyclotomic::one(8));
        let x = &Cyclotomic::root(1, 3) - &Cyclotomic::root(2, 3);
        // (w - w^2)(w^2 - w) = 3 for a primitive cube root w
        assert_eq!(&x * &x.conj(), Cyclotomic::from_int(3, 1));
    }

    fn arb(level: u32) -> impl Strategy<Value = Cyclotomic> {
        prop::collection::vec(-5i64..5, level as usize).prop_map(move |v| Cyclotomic::from_counts(&v, 1))
    }

    proptest! {
        #[test]
        fn normal_form_is_canonical(a in arb(12), b in arb(12)) {
            let d = &a - &b;
            prop_assert_eq!(d.is_zero(), a == b);
        }

        #[test]
        fn ring_laws(a in arb(8), b in arb(8), c in arb(4)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }
    }
}
