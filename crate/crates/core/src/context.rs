//! Shared caches of groups, subgroup lattices, monomial bases and parabolics,
//! keyed by field order and block shape.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::group::Group;
use crate::lattice::{SubgroupLattice, DEFAULT_SUBGROUP_CAP};
use crate::matrix::{gl_order, DEFAULT_ORDER_CAP};
use crate::parabolic::Parabolic;
use crate::rplus::PairBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest group that is ever enumerated.
    pub order: usize,
    /// Largest group whose subgroups are enumerated.
    pub subgroups: usize,
    /// Largest field order.
    pub field: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { order: DEFAULT_ORDER_CAP, subgroups: DEFAULT_SUBGROUP_CAP, field: crate::field::DEFAULT_FIELD_CAP }
    }
}

type Cell<V> = Arc<OnceLock<Result<Arc<V>>>>;

struct Memo<K, V> {
    map: Mutex<HashMap<K, Cell<V>>>,
}

impl<K: Eq + Hash, V> Memo<K, V> {
    fn new() -> Self {
        Memo { map: Mutex::new(HashMap::new()) }
    }

    fn get(&self, key: K, make: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        let cell = self.map.lock().unwrap().entry(key).or_default().clone();
        cell.get_or_init(|| make().map(Arc::new)).clone()
    }
}

pub struct Context {
    caps: Caps,
    sl_intersect: bool,
    fields: Memo<u32, FiniteField>,
    groups: Memo<(u32, Vec<usize>), Group>,
    lattices: Memo<(u32, Vec<usize>), SubgroupLattice>,
    bases: Memo<(u32, Vec<usize>), PairBasis>,
    parabolics: Memo<(u32, Vec<Vec<usize>>), Parabolic>,
}

impl Default for Context {
    fn default() -> Self {
        Self::new(Caps::default())
    }
}

fn nonzero(shape: &[usize]) -> Vec<usize> {
    shape.iter().copied().filter(|&a| a > 0).collect()
}

/// `q = p^k` with `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Parse `gl:n:q,gl:m:q,...` into the common field order and block shape.
/// `gl:0:q` (or an empty list of factors) is the trivial group.
pub fn parse_group_spec(spec: &str) -> Result<(u32, Vec<usize>)> {
    let bad = || Error::Parse(spec.to_string());
    let mut q = None;
    let mut shape = Vec::new();
    for part in spec.split(',').map(str::trim) {
        let fields: Vec<&str> = part.split(':').collect();
        let [kind, n, qq] = fields[..] else { return Err(bad()) };
        if !kind.eq_ignore_ascii_case("gl") {
            return Err(bad());
        }
        let n: usize = n.parse().map_err(|_| bad())?;
        let qq: u32 = qq.parse().map_err(|_| bad())?;
        if *q.get_or_insert(qq) != qq {
            return Err(Error::Parse(format!("{spec}: factors over different fields")));
        }
        if n > 0 {
            shape.push(n);
        }
    }
    let q = q.ok_or_else(bad)?;
    prime_power(q).ok_or(Error::UnsupportedField(q as u64))?;
    Ok((q, shape))
}

impl Context {
    pub fn new(caps: Caps) -> Self {
        Context {
            caps,
            sl_intersect: false,
            fields: Memo::new(),
            groups: Memo::new(),
            lattices: Memo::new(),
            bases: Memo::new(),
            parabolics: Memo::new(),
        }
    }

    /// Use `U` intersected with `SL` in place of `U` in parabolics.
    pub fn with_sl_intersect(mut self, on: bool) -> Self {
        self.sl_intersect = on;
        self
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn field(&self, q: u32) -> Result<Arc<FiniteField>> {
        self.fields.get(q, || {
            let (p, k) = prime_power(q).ok_or(Error::UnsupportedField(q as u64))?;
            FiniteField::with_cap(p, k, self.caps.field)
        })
    }

    /// Order of the block product without building it.
    pub fn order_of(q: u32, shape: &[usize]) -> u128 {
        shape.iter().map(|&a| gl_order(a, q)).product()
    }

    pub fn group(&self, q: u32, shape: &[usize]) -> Result<Arc<Group>> {
        let parts = nonzero(shape);
        self.groups.get((q, parts.clone()), || Group::block_product(self.field(q)?, &parts, self.caps.order))
    }

    pub fn lattice(&self, q: u32, shape: &[usize]) -> Result<Arc<SubgroupLattice>> {
        let parts = nonzero(shape);
        let order = Self::order_of(q, &parts);
        if order > self.caps.subgroups as u128 {
            return Err(Error::SubgroupCap { order: order as usize, cap: self.caps.subgroups });
        }
        self.lattices
            .get((q, parts.clone()), || {
                let g = self.group(q, &parts)?;
                SubgroupLattice::new(&g, self.caps.subgroups)
            })
    }

    pub fn basis(&self, q: u32, shape: &[usize]) -> Result<Arc<PairBasis>> {
        let parts = nonzero(shape);
        let lattice = self.lattice(q, &parts)?;
        self.bases.get((q, parts.clone()), || PairBasis::new(self.group(q, &parts)?, lattice))
    }

    /// Parabolic for a split of each ambient block into parts.
    pub fn parabolic(&self, q: u32, split: &[Vec<usize>]) -> Result<Arc<Parabolic>> {
        self.parabolics.get((q, split.to_vec()), || {
            let coarse: Vec<usize> = split.iter().map(|s| s.iter().sum()).collect();
            let fine: Vec<usize> = split.iter().flatten().copied().collect();
            Parabolic::new(self.group(q, &coarse)?, self.group(q, &fine)?, split.to_vec(), self.sl_intersect)
        })
    }

    /// Parabolic `P_{alpha, a - alpha}` of `G(a)`.
    pub fn parabolic_2(&self, q: u32, a: usize, alpha: usize) -> Result<Arc<Parabolic>> {
        if alpha > a {
            return Err(Error::SplitOutOfRange { alpha, degree: a });
        }
        self.parabolic(q, &[vec![alpha, a - alpha]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caching_and_caps() {
        let ctx = Context::default();
        let a = ctx.group(3, &[2]).unwrap();
        let b = ctx.group(3, &[0, 2]).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(ctx.group(4, &[1]).unwrap().order(), 3);
        assert!(matches!(ctx.lattice(3, &[3]), Err(Error::SubgroupCap { .. })));
        assert!(matches!(ctx.field(6), Err(Error::UnsupportedField(6))));
        assert_eq!(ctx.group(2, &[]).unwrap().order(), 1);
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(parse_group_spec("gl:1:3,gl:1:3").unwrap(), (3, vec![1, 1]));
        assert_eq!(parse_group_spec("gl:0:2").unwrap(), (2, vec![]));
        assert!(parse_group_spec("gl:1:3,gl:1:2").is_err());
        assert!(parse_group_spec("sl:2:3").is_err());
        assert!(parse_group_spec("gl:2:6").is_err());
    }
}
