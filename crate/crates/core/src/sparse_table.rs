//! Static range-min / range-max queries in O(1) after an O(n log n) build.

use rayon::prelude::*;

pub struct SparseTable<T> {
    levels: Vec<Vec<T>>,
    op: fn(T, T) -> T,
}

impl<T: Copy + Send + Sync> SparseTable<T> {
    pub fn new(data: Vec<T>, op: fn(T, T) -> T) -> Self {
        let mut levels = vec![data];
        let mut width = 1;
        while 2 * width <= levels[0].len() {
            let prev = levels.last().unwrap();
            let next: Vec<T> = (0..prev.len() - width)
                .into_par_iter()
                .map(|i| op(prev[i], prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels, op }
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fold of `op` over `data[lo..=hi]`.
    pub fn query(&self, lo: usize, hi: usize) -> T {
        assert!(lo <= hi && hi < self.len(), "bad range {lo}..={hi}");
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let level = &self.levels[k];
        (self.op)(level[lo], level[hi + 1 - (1 << k)])
    }
}

pub fn min_table<T: Copy + Ord + Send + Sync>(data: Vec<T>) -> SparseTable<T> {
    SparseTable::new(data, std::cmp::min)
}

pub fn max_table<T: Copy + Ord + Send + Sync>(data: Vec<T>) -> SparseTable<T> {
    SparseTable::new(data, std::cmp::max)
}
