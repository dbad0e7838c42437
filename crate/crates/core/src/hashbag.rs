//! Parallel hash bag: a concurrent, unordered container for frontier items.
//!
//! The slot array is allocated once for a known upper bound and logically
//! split into chunks of sizes `λ, λ, 2λ, 4λ, ...` (chunk `i` ends at
//! `tail[i] = λ·2^i`). Inserts always land in the current chunk `r`. Each
//! insert samples itself with probability `σ/(α·|chunk|)`; once `σ` samples
//! are counted the chunk is estimated to be about `α` full and `r` advances
//! by CAS. Nothing is ever copied or reallocated, and [`HashBag::extract_all`]
//! only scans the prefix `[0, tail[r])`.
//!
//! Callers must never insert an item that is already present; frontier code
//! dedups through visit flags or a pair table first.

use std::sync::atomic::{AtomicU32, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hash::{mix2, mix64};

/// An item storable in a [`HashBag`]. One value is reserved as the empty marker.
pub trait BagItem: Copy + Send + Sync + Eq + std::fmt::Debug + 'static {
    type Slot: Send + Sync;
    const EMPTY: Self;
    fn empty_slot() -> Self::Slot;
    fn try_claim(slot: &Self::Slot, value: Self) -> bool;
    fn load(slot: &Self::Slot) -> Self;
    fn take(slot: &Self::Slot) -> Self;
    fn key(self) -> u64;
}

impl BagItem for u32 {
    type Slot = AtomicU32;
    const EMPTY: Self = u32::MAX;

    fn empty_slot() -> AtomicU32 {
        AtomicU32::new(u32::MAX)
    }

    #[inline]
    fn try_claim(slot: &AtomicU32, value: u32) -> bool {
        slot.load(Ordering::Relaxed) == u32::MAX
            && slot
                .compare_exchange(u32::MAX, value, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
    }

    #[inline]
    fn load(slot: &AtomicU32) -> u32 {
        slot.load(Ordering::Acquire)
    }

    #[inline]
    fn take(slot: &AtomicU32) -> u32 {
        if slot.load(Ordering::Relaxed) == u32::MAX {
            u32::MAX
        } else {
            slot.swap(u32::MAX, Ordering::AcqRel)
        }
    }

    fn key(self) -> u64 {
        self as u64
    }
}

impl BagItem for u64 {
    type Slot = AtomicU64;
    const EMPTY: Self = u64::MAX;

    fn empty_slot() -> AtomicU64 {
        AtomicU64::new(u64::MAX)
    }

    #[inline]
    fn try_claim(slot: &AtomicU64, value: u64) -> bool {
        slot.load(Ordering::Relaxed) == u64::MAX
            && slot
                .compare_exchange(u64::MAX, value, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
    }

    #[inline]
    fn load(slot: &AtomicU64) -> u64 {
        slot.load(Ordering::Acquire)
    }

    #[inline]
    fn take(slot: &AtomicU64) -> u64 {
        if slot.load(Ordering::Relaxed) == u64::MAX {
            u64::MAX
        } else {
            slot.swap(u64::MAX, Ordering::AcqRel)
        }
    }

    fn key(self) -> u64 {
        self
    }
}

/// Tuning knobs of a hash bag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BagParams {
    /// First chunk size `λ`.
    pub lambda: usize,
    /// Samples per chunk that trigger a resize, `σ`.
    pub sigma: usize,
    /// Target load factor `α` in (0, 1).
    pub alpha: f64,
    /// Linear-probe limit `κ` before a forced resize attempt.
    pub kappa: usize,
    /// Salt for slot selection; fixes the layout for a given insert sequence.
    pub seed: u64,
}

impl Default for BagParams {
    fn default() -> Self {
        Self {
            lambda: 1 << 10,
            sigma: 50,
            alpha: 0.5,
            kappa: 128,
            seed: 0x5eed_ba65,
        }
    }
}

impl BagParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 || !self.lambda.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a positive power of two, got {}",
                self.lambda
            )));
        }
        if self.sigma == 0 {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.kappa == 0 {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        Ok(())
    }
}

pub struct HashBag<T: BagItem> {
    slots: Box<[T::Slot]>,
    tail: Vec<usize>,
    /// Per-chunk sampling threshold on the low 32 bits of the slot draw.
    threshold: Vec<u64>,
    sample: Vec<AtomicUsize>,
    r: AtomicUsize,
    params: BagParams,
}

impl<T: BagItem> HashBag<T> {
    /// A bag able to hold `upper_bound` items with default parameters.
    pub fn new(upper_bound: usize) -> Self {
        Self::with_params(upper_bound, BagParams::default()).expect("default parameters are valid")
    }

    pub fn with_params(upper_bound: usize, params: BagParams) -> Result<Self> {
        params.validate()?;
        let need = ((upper_bound + params.lambda) as f64 / params.alpha).ceil() as usize;
        let mut tail = vec![params.lambda];
        while *tail.last().unwrap() < need {
            let next = tail.last().unwrap() * 2;
            tail.push(next);
        }
        let capacity = *tail.last().unwrap();
        let threshold = (0..tail.len())
            .map(|i| {
                let size = Self::chunk_bounds_of(&tail, i).1 - Self::chunk_bounds_of(&tail, i).0;
                let rate = params.sigma as f64 / (params.alpha * size as f64);
                if rate >= 1.0 {
                    1u64 << 32
                } else {
                    (rate * (1u64 << 32) as f64) as u64
                }
            })
            .collect();
        let slots = (0..capacity).map(|_| T::empty_slot()).collect();
        let sample = (0..tail.len()).map(|_| AtomicUsize::new(0)).collect();
        Ok(Self {
            slots,
            tail,
            threshold,
            sample,
            r: AtomicUsize::new(0),
            params,
        })
    }

    fn chunk_bounds_of(tail: &[usize], i: usize) -> (usize, usize) {
        let lo = if i == 0 { 0 } else { tail[i - 1] };
        (lo, tail[i])
    }

    /// Half-open slot range of chunk `i`.
    pub fn chunk_bounds(&self, i: usize) -> (usize, usize) {
        Self::chunk_bounds_of(&self.tail, i)
    }

    pub fn tails(&self) -> &[usize] {
        &self.tail
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn num_chunks(&self) -> usize {
        self.tail.len()
    }

    /// Index of the chunk currently receiving inserts.
    pub fn current_chunk(&self) -> usize {
        self.r.load(Ordering::Acquire)
    }

    /// Length of the slot prefix that extraction scans.
    pub fn scan_len(&self) -> usize {
        self.tail[self.current_chunk()]
    }

    pub fn params(&self) -> &BagParams {
        &self.params
    }

    fn try_resize(&self, r: usize) {
        if r + 1 < self.tail.len() {
            let _ = self
                .r
                .compare_exchange(r, r + 1, Ordering::AcqRel, Ordering::Acquire);
        }
    }

    /// Counts a sample in chunk `r`. Returns false when the chunk should be
    /// abandoned and the insert retried.
    fn record_sample(&self, r: usize) -> bool {
        let counter = &self.sample[r];
        let sigma = self.params.sigma;
        let mut failures = 0;
        let mut t = counter.load(Ordering::Acquire);
        loop {
            if t >= sigma {
                return false;
            }
            match counter.compare_exchange_weak(t, t + 1, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => return t + 1 < sigma,
                Err(cur) => {
                    t = cur;
                    failures += 1;
                    if failures >= sigma {
                        return false;
                    }
                }
            }
        }
    }

    /// Adds `value`. Safe to call from many threads at once.
    ///
    /// Fails only when every chunk is full, meaning the caller inserted more
    /// than the declared upper bound.
    pub fn insert(&self, value: T) -> Result<()> {
        debug_assert!(value != T::EMPTY);
        let base = mix2(value.key(), self.params.seed);
        let last = self.tail.len() - 1;
        let mut attempt = 0u64;
        loop {
            let r = self.r.load(Ordering::Acquire);
            let (lo, hi) = self.chunk_bounds(r);
            let size = hi - lo;
            let draw = mix64(base ^ ((r as u64) << 48) ^ attempt);
            attempt += 1;

            if r < last && (draw & 0xffff_ffff) < self.threshold[r] && !self.record_sample(r) {
                self.try_resize(r);
                continue;
            }

            let mut i = lo + ((draw >> 32) as usize % size);
            let limit = if r < last { self.params.kappa.min(size) } else { size };
            let mut placed = false;
            for _ in 0..limit {
                if T::try_claim(&self.slots[i], value) {
                    placed = true;
                    break;
                }
                i += 1;
                if i == hi {
                    i = lo;
                }
            }
            if placed {
                return Ok(());
            }
            if r == last {
                return Err(Error::BagFull {
                    capacity: self.capacity(),
                });
            }
            self.try_resize(r);
        }
    }

    /// Removes and returns every item. Requires quiescence (`&mut`).
    ///
    /// Output order depends only on the slot layout, so a single-threaded
    /// insert sequence always extracts in the same order.
    pub fn extract_all(&mut self) -> Vec<T> {
        let end = self.scan_len();
        let out: Vec<T> = self.slots[..end]
            .par_iter()
            .with_min_len(4096)
            .filter_map(|s| {
                let v = T::take(s);
                (v != T::EMPTY).then_some(v)
            })
            .collect();
        self.reset_counters();
        out
    }

    /// Applies `f` to every item once. Requires quiescence (`&mut`).
    pub fn for_all<F>(&mut self, f: F)
    where
        F: Fn(T) + Sync + Send,
    {
        let end = self.scan_len();
        self.slots[..end]
            .par_iter()
            .with_min_len(4096)
            .for_each(|s| {
                let v = T::load(s);
                if v != T::EMPTY {
                    f(v)
                }
            });
    }

    /// Drops every item without collecting them.
    pub fn clear(&mut self) {
        let end = self.scan_len();
        self.slots[..end].par_iter().with_min_len(4096).for_each(|s| {
            T::take(s);
        });
        self.reset_counters();
    }

    fn reset_counters(&mut self) {
        let r = *self.r.get_mut();
        for c in &mut self.sample[..=r] {
            *c.get_mut() = 0;
        }
        *self.r.get_mut() = 0;
    }

    /// Occupied slots in chunk `i` (quiescent use only).
    pub fn chunk_occupancy(&self, i: usize) -> usize {
        let (lo, hi) = self.chunk_bounds(i);
        self.slots[lo..hi]
            .iter()
            .filter(|s| T::load(s) != T::EMPTY)
            .count()
    }

    /// One past the highest occupied slot (quiescent use only).
    pub fn occupied_extent(&self) -> usize {
        self.slots
            .iter()
            .rposition(|s| T::load(s) != T::EMPTY)
            .map_or(0, |i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;
    use std::sync::Mutex;

    fn pool(threads: usize) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    }

    #[test]
    fn tails_double_from_lambda() {
        let bag = HashBag::<u32>::new(100_000);
        let t = bag.tails();
        assert_eq!(&t[..4], &[1024, 2048, 4096, 8192]);
        assert!(t.windows(2).all(|w| w[1] == 2 * w[0]));
    }

    #[test]
    fn zero_upper_bound_is_usable() {
        let mut bag = HashBag::<u32>::new(0);
        assert!(bag.capacity() >= 1024);
        bag.insert(7).unwrap();
        assert_eq!(bag.extract_all(), vec![7]);
    }

    #[test]
    fn capacity_covers_upper_bound_over_alpha() {
        let bag = HashBag::<u32>::new(1_000_000);
        assert!(bag.capacity() >= 2_000_000);
    }

    #[test]
    fn fresh_bag_extracts_nothing() {
        let mut bag = HashBag::<u32>::new(10);
        assert!(bag.extract_all().is_empty());
        let calls = AtomicUsize::new(0);
        bag.for_all(|_| {
            calls.fetch_add(1, Ordering::Relaxed);
        });
        assert_eq!(calls.into_inner(), 0);
    }

    #[test]
    fn small_sets_round_trip() {
        let mut bag = HashBag::<u32>::new(10);
        for v in [5, 9, 42] {
            bag.insert(v).unwrap();
        }
        let calls = AtomicUsize::new(0);
        bag.for_all(|_| {
            calls.fetch_add(1, Ordering::Relaxed);
        });
        assert_eq!(calls.into_inner(), 3);
        let mut got = bag.extract_all();
        got.sort();
        assert_eq!(got, vec![5, 9, 42]);
        assert_eq!(bag.current_chunk(), 0);
        assert!(bag.extract_all().is_empty());
    }

    #[test]
    fn ten_thousand_inserts_any_thread_count() {
        for threads in [1, 3, 8] {
            let mut bag = HashBag::<u32>::new(10_000);
            pool(threads).install(|| {
                (0..10_000u32)
                    .into_par_iter()
                    .for_each(|v| bag.insert(v * 3 + 1).unwrap())
            });
            let mut got = bag.extract_all();
            got.sort();
            let expect: Vec<u32> = (0..10_000).map(|v| v * 3 + 1).collect();
            assert_eq!(got, expect, "threads = {threads}");
        }
    }

    #[test]
    fn for_all_sees_inserted_set() {
        let mut bag = HashBag::<u64>::new(5000);
        let input: HashSet<u64> = (0..5000u64).map(|v| v * v + 11).collect();
        input.par_iter().for_each(|&v| bag.insert(v).unwrap());
        let seen = Mutex::new(HashSet::new());
        bag.for_all(|v| {
            assert!(seen.lock().unwrap().insert(v));
        });
        assert_eq!(seen.into_inner().unwrap(), input);
    }

    #[test]
    fn hundred_thousand_random_inserts_sort_compare() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut input: Vec<u32> = (0..1_000_000).collect();
        input.shuffle(&mut rng);
        input.truncate(100_000);
        let mut bag = HashBag::<u32>::new(1_000_000);
        input.par_iter().for_each(|&v| bag.insert(v).unwrap());
        let mut got = bag.extract_all();
        got.sort_unstable();
        input.sort_unstable();
        assert_eq!(got, input);
    }

    #[test]
    fn chunk_growth_stays_logarithmic() {
        // Replayed single-threaded: r after s inserts is deterministic.
        for s in [10usize, 1000, 10_000, 100_000] {
            let bag = HashBag::<u32>::new(200_000);
            for v in 0..s as u32 {
                bag.insert(v).unwrap();
            }
            let p = bag.params();
            let bound = ((s as f64 / (p.alpha * p.lambda as f64)) + 1.0).log2().ceil() as usize + 2;
            assert!(
                bag.current_chunk() <= bound,
                "s = {s}: r = {} > {bound}",
                bag.current_chunk()
            );
        }
    }

    #[test]
    fn reuse_after_extract() {
        let mut bag = HashBag::<u32>::new(50_000);
        for round in 0..3u32 {
            for v in 0..20_000u32 {
                bag.insert(v + round).unwrap();
            }
            assert!(bag.current_chunk() > 0);
            let got = bag.extract_all();
            assert_eq!(got.len(), 20_000);
            assert_eq!(bag.current_chunk(), 0);
            assert_eq!(bag.occupied_extent(), 0);
        }
    }

    #[test]
    fn overfull_bag_reports_error() {
        let params = BagParams {
            lambda: 4,
            ..BagParams::default()
        };
        let bag = HashBag::<u32>::with_params(0, params).unwrap();
        let cap = bag.capacity() as u32;
        let mut failed = false;
        for v in 0..=cap {
            if bag.insert(v).is_err() {
                failed = true;
                break;
            }
        }
        assert!(failed);
    }

    #[test]
    fn rejects_bad_parameters() {
        for p in [
            BagParams { lambda: 0, ..Default::default() },
            BagParams { lambda: 1000, ..Default::default() },
            BagParams { alpha: 1.0, ..Default::default() },
            BagParams { sigma: 0, ..Default::default() },
            BagParams { kappa: 0, ..Default::default() },
        ] {
            assert!(HashBag::<u32>::with_params(10, p).is_err());
        }
    }

    #[test]
    fn deterministic_layout_single_thread() {
        let run = || {
            let mut bag = HashBag::<u32>::new(30_000);
            for v in (0..30_000u32).rev() {
                bag.insert(v).unwrap();
            }
            bag.extract_all()
        };
        assert_eq!(run(), run());
    }
}
