//! Concurrent union-find with hash-priority linking and CAS path halving.
//!
//! A root is only ever linked below a root of higher priority, where the
//! priority of `x` is `(mix64(x), x)`. Priorities are fixed per id, so no
//! cycles can form even when unions race.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::graph::VertexId;
use crate::hash::mix64;

pub struct UnionFind {
    parent: Vec<AtomicU32>,
}

#[inline]
fn priority(x: VertexId) -> (u64, VertexId) {
    (mix64(x as u64), x)
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as VertexId).into_par_iter().map(AtomicU32::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    fn parent_of(&self, x: VertexId) -> VertexId {
        self.parent[x as usize].load(Ordering::Acquire)
    }

    pub fn find(&self, mut x: VertexId) -> VertexId {
        loop {
            let p = self.parent_of(x);
            if p == x {
                return x;
            }
            let gp = self.parent_of(p);
            if gp == p {
                return p;
            }
            // Halving: a failed CAS only means someone else compressed first.
            let _ = self.parent[x as usize].compare_exchange(p, gp, Ordering::AcqRel, Ordering::Relaxed);
            x = gp;
        }
    }

    /// Merges the sets of `a` and `b`. Returns true iff this call performed
    /// the link, so across racing calls each merge is reported exactly once.
    pub fn union(&self, a: VertexId, b: VertexId) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        loop {
            if ra == rb {
                return false;
            }
            let (lo, hi) = if priority(ra) < priority(rb) { (ra, rb) } else { (rb, ra) };
            if self.parent[lo as usize]
                .compare_exchange(lo, hi, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
            {
                return true;
            }
            ra = self.find(ra);
            rb = self.find(rb);
        }
    }

    pub fn same_set(&self, a: VertexId, b: VertexId) -> bool {
        loop {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                return true;
            }
            // ra may have been linked since it was read; only trust a stable root.
            if self.parent_of(ra) == ra {
                return false;
            }
        }
    }

    /// Root of every element.
    pub fn roots(&self) -> Vec<VertexId> {
        (0..self.parent.len() as VertexId)
            .into_par_iter()
            .map(|x| self.find(x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;

    #[test]
    fn basic_merges() {
        let uf = UnionFind::new(6);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert!(uf.same_set(0, 2));
        assert!(!uf.same_set(0, 4));
        assert!(!uf.union(0, 3));
    }

    #[test]
    fn concurrent_unions_count_exactly_n_minus_components() {
        let n = 20_000u32;
        let uf = UnionFind::new(n as usize);
        let merges = AtomicUsize::new(0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        // Ten residue classes mod 10, linked in a scrambled order.
        pool.install(|| {
            (0..n - 10).into_par_iter().for_each(|i| {
                let a = (i * 7919) % (n - 10);
                if uf.union(a, a + 10) {
                    merges.fetch_add(1, Ordering::Relaxed);
                }
            })
        });
        assert_eq!(merges.into_inner(), n as usize - 10);
        let roots = uf.roots();
        for v in 0..n {
            assert_eq!(roots[v as usize], roots[(v % 10) as usize]);
        }
        let distinct: std::collections::BTreeSet<_> = roots.iter().collect();
        assert_eq!(distinct.len(), 10);
    }
}
