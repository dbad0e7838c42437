//! Phase-concurrent table of reachability pairs `(vertex, source)`.
//!
//! Pairs are packed into one `u64` (vertex in the high half) and stored by
//! linear probing from a hash of the vertex alone, so every pair of a vertex
//! sits in the probe run starting at that vertex's home slot. That makes
//! "all sources of `v`" a short scan that stops at the first empty slot.
//! Pairs are only ever inserted between two calls to [`ReachPairTable::clear`].

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::hash::mix64;

const EMPTY: u64 = u64::MAX;

/// Maximum fraction of occupied slots before inserts report overflow.
pub const TABLE_LOAD: f64 = 0.5;

#[inline]
pub fn pack(vertex: VertexId, source: VertexId) -> u64 {
    ((vertex as u64) << 32) | source as u64
}

#[inline]
pub fn unpack(key: u64) -> (VertexId, VertexId) {
    ((key >> 32) as VertexId, key as VertexId)
}

pub struct ReachPairTable {
    slots: Box<[AtomicU64]>,
    mask: usize,
    count: AtomicUsize,
    max_entries: usize,
}

impl ReachPairTable {
    /// A table holding at least `min_pairs` pairs at load factor [`TABLE_LOAD`].
    pub fn with_capacity(min_pairs: usize) -> Self {
        let slots = ((min_pairs.max(16) as f64 / TABLE_LOAD).ceil() as usize).next_power_of_two();
        Self {
            slots: (0..slots).map(|_| AtomicU64::new(EMPTY)).collect(),
            mask: slots - 1,
            count: AtomicUsize::new(0),
            max_entries: (slots as f64 * TABLE_LOAD) as usize,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Pairs the table accepts before reporting overflow.
    pub fn max_pairs(&self) -> usize {
        self.max_entries
    }

    pub fn len(&self) -> usize {
        self.count.load(Ordering::Acquire)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn home(&self, vertex: VertexId) -> usize {
        mix64(vertex as u64) as usize & self.mask
    }

    /// Inserts `(vertex, source)`. Returns whether the pair is new; exactly
    /// one of several racing inserts of the same pair sees `true`.
    pub fn insert(&self, vertex: VertexId, source: VertexId) -> Result<bool> {
        let key = pack(vertex, source);
        let mut i = self.home(vertex);
        for _ in 0..self.slots.len() {
            let slot = &self.slots[i];
            let mut cur = slot.load(Ordering::SeqCst);
            if cur == EMPTY {
                if self.count.load(Ordering::Relaxed) >= self.max_entries {
                    return Err(self.overflow());
                }
                match slot.compare_exchange(EMPTY, key, Ordering::SeqCst, Ordering::SeqCst) {
                    Ok(_) => {
                        self.count.fetch_add(1, Ordering::AcqRel);
                        return Ok(true);
                    }
                    Err(now) => cur = now,
                }
            }
            if cur == key {
                return Ok(false);
            }
            i = (i + 1) & self.mask;
        }
        Err(self.overflow())
    }

    fn overflow(&self) -> Error {
        Error::TableOverflow {
            count: self.len(),
            capacity: self.capacity(),
        }
    }

    pub fn contains(&self, vertex: VertexId, source: VertexId) -> bool {
        let key = pack(vertex, source);
        let mut i = self.home(vertex);
        for _ in 0..self.slots.len() {
            match self.slots[i].load(Ordering::SeqCst) {
                EMPTY => return false,
                k if k == key => return true,
                _ => i = (i + 1) & self.mask,
            }
        }
        false
    }

    /// Calls `f` for every source currently paired with `vertex`.
    #[inline]
    pub fn for_each_source(&self, vertex: VertexId, mut f: impl FnMut(VertexId)) {
        let mut i = self.home(vertex);
        for _ in 0..self.slots.len() {
            let k = self.slots[i].load(Ordering::SeqCst);
            if k == EMPTY {
                return;
            }
            let (v, s) = unpack(k);
            if v == vertex {
                f(s);
            }
            i = (i + 1) & self.mask;
        }
    }

    pub fn sources_of(&self, vertex: VertexId, out: &mut Vec<VertexId>) {
        out.clear();
        self.for_each_source(vertex, |s| out.push(s));
    }

    /// Every stored pair as `(vertex, source)`, in slot order.
    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.slots
            .par_iter()
            .with_min_len(4096)
            .filter_map(|s| {
                let k = s.load(Ordering::Acquire);
                (k != EMPTY).then(|| unpack(k))
            })
            .collect()
    }

    pub fn clear(&mut self) {
        self.slots
            .par_iter_mut()
            .with_min_len(4096)
            .for_each(|s| *s.get_mut() = EMPTY);
        *self.count.get_mut() = 0;
    }
}

/// Records `(source, target)` for LE-list multi-BFS; true iff new this batch.
pub fn lelist_pair_dedup(table: &ReachPairTable, source: VertexId, target: VertexId) -> Result<bool> {
    table.insert(target, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn first_insert_true_repeat_false() {
        let t = ReachPairTable::with_capacity(8);
        assert!(lelist_pair_dedup(&t, 3, 9).unwrap());
        assert!(!lelist_pair_dedup(&t, 3, 9).unwrap());
        assert!(t.contains(9, 3));
        assert!(!t.contains(3, 9));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn concurrent_duplicate_race_has_one_winner() {
        let t = ReachPairTable::with_capacity(1 << 12);
        let wins = AtomicUsize::new(0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        pool.install(|| {
            (0..64 * 1000u32).into_par_iter().for_each(|i| {
                if t.insert(i % 1000, 7).unwrap() {
                    wins.fetch_add(1, Ordering::Relaxed);
                }
            })
        });
        assert_eq!(wins.into_inner(), 1000);
        assert_eq!(t.len(), 1000);
    }

    #[test]
    fn sources_enumerated_per_vertex() {
        let t = ReachPairTable::with_capacity(1000);
        let mut expect = BTreeSet::new();
        for v in 0..50u32 {
            for s in 0..(v % 7) {
                t.insert(v, s * 13).unwrap();
                expect.insert((v, s * 13));
            }
        }
        let mut got = BTreeSet::new();
        let mut buf = Vec::new();
        for v in 0..50u32 {
            t.sources_of(v, &mut buf);
            got.extend(buf.iter().map(|&s| (v, s)));
        }
        assert_eq!(got, expect);
        assert_eq!(t.pairs().into_iter().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn overflow_is_reported_not_lost() {
        let t = ReachPairTable::with_capacity(16);
        let max = t.max_pairs();
        for i in 0..max as u32 {
            assert!(t.insert(i, i).unwrap());
        }
        assert!(matches!(t.insert(99_999, 1), Err(Error::TableOverflow { .. })));
        assert_eq!(t.len(), max);
    }

    #[test]
    fn clear_resets() {
        let mut t = ReachPairTable::with_capacity(16);
        t.insert(1, 2).unwrap();
        t.clear();
        assert!(t.is_empty());
        assert!(!t.contains(1, 2));
        assert!(t.insert(1, 2).unwrap());
    }
}
