//! Permutation utilities and exact group order by orbit–stabilizer
//! recursion.
//!
//! The order computation applies Schreier's lemma directly: pick the
//! smallest moved point, build its orbit with a transversal, collect the
//! deduplicated Schreier generators of the stabilizer and recurse. Every
//! recursion level fixes a new smallest point, so the chain terminates,
//! and the product of orbit lengths is the exact group order.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

pub(crate) fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&v| a[v as usize]).collect()
}

pub(crate) fn inverse(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (v, &im) in p.iter().enumerate() {
        inv[im as usize] = v as u32;
    }
    inv
}

pub(crate) fn identity(n: usize) -> Vec<u32> {
    (0..n as u32).collect()
}

pub(crate) fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(v, &im)| im == v as u32)
}

pub(crate) fn group_order(n: usize, gens: &[Vec<u32>]) -> BigUint {
    let gens: Vec<&Vec<u32>> = {
        let mut distinct: HashSet<&Vec<u32>> = HashSet::new();
        gens.iter()
            .filter(|g| !is_identity(g) && distinct.insert(*g))
            .collect()
    };
    if gens.is_empty() {
        return BigUint::from(1u32);
    }
    let base = (0..n as u32)
        .find(|&v| gens.iter().any(|g| g[v as usize] != v))
        .expect("non-identity generators move a point");
    // orbit of base with transversal: trans[x] maps base to x
    let mut trans: HashMap<u32, Vec<u32>> = HashMap::new();
    trans.insert(base, identity(n));
    let mut queue = vec![base];
    while let Some(x) = queue.pop() {
        let tx = trans[&x].clone();
        for g in &gens {
            let y = g[x as usize];
            if !trans.contains_key(&y) {
                trans.insert(y, compose(g, &tx));
                queue.push(y);
            }
        }
    }
    let orbit_len = trans.len();
    // Schreier generators of the stabilizer of base
    let mut stab: HashSet<Vec<u32>> = HashSet::new();
    for (&x, tx) in &trans {
        for g in &gens {
            let y = g[x as usize];
            let h = compose(&inverse(&trans[&y]), &compose(g, tx));
            if !is_identity(&h) {
                stab.insert(h);
            }
        }
    }
    let stab: Vec<Vec<u32>> = stab.into_iter().collect();
    BigUint::from(orbit_len) * group_order(n, &stab)
}

/// All group elements by closure over the generators, or None once the
/// element count exceeds `cap`.
pub(crate) fn enumerate_group(
    n: usize,
    gens: &[Vec<u32>],
    cap: usize,
) -> Option<Vec<Vec<u32>>> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(identity(n));
    let mut queue = vec![identity(n)];
    while let Some(p) = queue.pop() {
        for g in gens {
            let q = compose(g, &p);
            if !seen.contains(&q) {
                if seen.len() >= cap {
                    return None;
                }
                seen.insert(q.clone());
                queue.push(q);
            }
        }
    }
    Some(seen.into_iter().collect())
}

#[derive(Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, v: u32) -> u32 {
        let mut v = v;
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }

    /// Number of distinct classes among the ids in `range`.
    pub fn class_count(&mut self, range: std::ops::Range<u32>) -> usize {
        let mut roots: HashSet<u32> = HashSet::new();
        for v in range {
            roots.insert(self.find(v));
        }
        roots.len()
    }
}
