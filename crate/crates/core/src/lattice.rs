//! Enumeration of all subgroups of a small group and their conjugacy classes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{ElemSet, Group};

/// Default cap on the group order for subgroup enumeration.
pub const DEFAULT_SUBGROUP_CAP: usize = 400;

#[derive(Debug)]
pub struct SubgroupLattice {
    /// Sorted by order, then by element list.
    pub subgroups: Vec<ElemSet>,
    index: HashMap<Vec<u32>, usize>,
    /// Conjugacy class of each subgroup.
    pub class_of: Vec<usize>,
    /// Members of each class; the first is the representative, which has
    /// the least element list in the class.
    pub classes: Vec<Vec<usize>>,
    /// An element `x` with `x S x^-1` equal to the class representative.
    pub to_rep: Vec<u32>,
}

impl SubgroupLattice {
    pub fn new(group: &Group, cap: usize) -> Result<Self> {
        if group.order() > cap {
            return Err(Error::SubgroupCap { order: group.order(), cap });
        }
        // cyclic subgroups, each with one generator
        let mut cyclic: HashMap<Vec<u32>, u32> = HashMap::new();
        for x in 0..group.order() as u32 {
            let c = group.closure(&[x]);
            cyclic.entry(c.elems().to_vec()).or_insert(x);
        }
        let mut cyc: Vec<(Vec<u32>, u32)> = cyclic.into_iter().collect();
        cyc.sort();
        let cyc_gens: Vec<u32> = cyc.iter().map(|c| c.1).collect();

        let mut found: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        let mut queue: Vec<(ElemSet, Vec<u32>)> = Vec::new();
        let triv = group.trivial();
        found.insert(triv.elems().to_vec(), Vec::new());
        queue.push((triv, Vec::new()));
        let mut i = 0;
        while i < queue.len() {
            let (h, gens) = queue[i].clone();
            i += 1;
            for &c in &cyc_gens {
                if h.contains(c) {
                    continue;
                }
                let k = group.extend_with(&h, &gens, &[c]);
                if !found.contains_key(k.elems()) {
                    let mut kg = gens.clone();
                    kg.push(c);
                    found.insert(k.elems().to_vec(), kg.clone());
                    queue.push((k, kg));
                }
            }
        }
        let mut subgroups: Vec<ElemSet> = queue.into_iter().map(|(h, _)| h).collect();
        subgroups.sort_by(|a, b| a.canonical_cmp(b));
        let index: HashMap<Vec<u32>, usize> =
            subgroups.iter().enumerate().map(|(i, s)| (s.elems().to_vec(), i)).collect();

        let n = subgroups.len();
        let mut class_of = vec![usize::MAX; n];
        let mut to_rep = vec![group.identity(); n];
        let mut classes = Vec::new();
        for s in 0..n {
            if class_of[s] != usize::MAX {
                continue;
            }
            // s is the least member of its class since the list is sorted
            let c = classes.len();
            let mut members = vec![s];
            class_of[s] = c;
            for g in 0..group.order() as u32 {
                let conj = group.conjugate_set(&subgroups[s], g);
                let t = index[conj.elems()];
                if class_of[t] == usize::MAX {
                    class_of[t] = c;
                    // g S g^-1 = T, so g^-1 T g = S
                    to_rep[t] = group.inv(g);
                    members.push(t);
                }
            }
            members[1..].sort_unstable();
            classes.push(members);
        }
        Ok(SubgroupLattice { subgroups, index, class_of, classes, to_rep })
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn find(&self, set: &ElemSet) -> Option<usize> {
        self.index.get(set.elems()).copied()
    }

    pub fn rep_of(&self, s: usize) -> usize {
        self.classes[self.class_of[s]][0]
    }
}
