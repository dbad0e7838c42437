//! Least-element lists by batched multi-source BFS.
//!
//! Sources are taken in priority order, in batches growing by `β`. Within a
//! batch every source runs a level-synchronous BFS at once; the frontier is a
//! hash bag of packed `(vertex, source)` pairs deduplicated through a
//! [`ReachPairTable`]. A pair `(u, s)` at depth `d` is kept only if `d` is
//! below `δ(u)`, the best distance any earlier batch found for `u`. Every
//! surviving pair becomes a candidate entry. `δ` is lowered only between
//! batches, so same-batch sources never prune each other; a final per-vertex
//! sweep by priority drops every candidate that is not strictly closer than
//! all earlier ones.
//!
//! Pruning only discards pairs that cannot be list entries: if an earlier
//! source is at least as close to some vertex on a shortest `s`-`u` path, it
//! is at least as close to `u`. Candidates that arrive along non-shortest
//! paths carry distances no smaller than the true one and are removed by the
//! sweep.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::hashbag::{BagParams, HashBag};
use crate::io::LeLists;
use crate::pairs::{lelist_pair_dedup, pack, unpack, ReachPairTable};
use crate::scc::BatchSchedule;

const MIN_TABLE: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeParams {
    pub beta: f64,
    pub bag: BagParams,
    /// Keep a copy of `δ` after every batch (for inspection).
    pub trace_delta: bool,
}

impl Default for LeParams {
    fn default() -> Self {
        Self {
            beta: 1.5,
            bag: BagParams::default(),
            trace_delta: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LeStats {
    pub batches: usize,
    pub rounds: usize,
    pub candidates: usize,
    pub table_retries: usize,
    pub delta_trace: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct LeResult {
    pub lists: LeLists,
    pub stats: LeStats,
}

impl LeResult {
    pub fn total_len(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// Position of every vertex in `order`; errors unless `order` is a permutation.
pub fn priority_ranks(order: &[VertexId], n: usize) -> Result<Vec<u32>> {
    if order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "priority order has {} entries for {n} vertices",
            order.len()
        )));
    }
    let mut rank = vec![u32::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        match rank.get_mut(v as usize) {
            Some(r) if *r == u32::MAX => *r = i as u32,
            Some(_) => return Err(Error::InvalidParameter(format!("vertex {v} repeated in priority order"))),
            None => return Err(Error::VertexOutOfRange(v, n)),
        }
    }
    Ok(rank)
}

/// Reduces one vertex's candidates to its LE-list: in priority order, keep an
/// entry only if it is strictly closer than everything kept before it.
/// The result is in decreasing distance order.
pub fn filter_candidates(cands: &mut [(VertexId, u32)], rank: &[u32]) -> Vec<(VertexId, u32)> {
    cands.sort_unstable_by_key(|&(s, d)| (rank[s as usize], d));
    let mut best = u32::MAX;
    let mut out = Vec::new();
    for &(s, d) in cands.iter() {
        if d < best {
            best = d;
            out.push((s, d));
        }
    }
    out
}

/// Runs one batch. Returns candidates `(target, source, distance)` and rounds.
fn run_batch(
    g: &Graph,
    sources: &[VertexId],
    delta: &[u32],
    table: &ReachPairTable,
    bag: &mut HashBag<u64>,
) -> Result<(Vec<(VertexId, VertexId, u32)>, usize)> {
    let mut cands = Vec::new();
    let mut frontier = Vec::with_capacity(sources.len());
    for &s in sources {
        if 0 < delta[s as usize] && lelist_pair_dedup(table, s, s)? {
            frontier.push(pack(s, s));
            cands.push((s, s, 0));
        }
    }
    let mut rounds = 0;
    let mut d = 0u32;
    while !frontier.is_empty() {
        rounds += 1;
        d += 1;
        frontier.par_iter().try_for_each(|&key| -> Result<()> {
            let (x, s) = unpack(key);
            for &u in g.out_neighbors(x) {
                if d < delta[u as usize] && lelist_pair_dedup(table, s, u)? {
                    bag.insert(pack(u, s))?;
                }
            }
            Ok(())
        })?;
        frontier = bag.extract_all();
        cands.extend(frontier.iter().map(|&k| {
            let (u, s) = unpack(k);
            (u, s, d)
        }));
    }
    Ok((cands, rounds))
}

/// LE-lists of an undirected graph. `order[0]` has the highest priority.
pub fn run_lelists(g: &Graph, order: &[VertexId], params: &LeParams) -> Result<LeResult> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    params.bag.validate()?;
    if !(params.beta >= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must be >= 1, got {}", params.beta)));
    }
    let n = g.num_vertices();
    let rank = priority_ranks(order, n)?;
    let schedule = BatchSchedule::new(order.to_vec(), params.beta);
    let delta: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(u32::MAX)).collect();
    let mut stats = LeStats::default();
    let mut all: Vec<(VertexId, VertexId, u32)> = Vec::new();
    let mut prev = 0usize;

    for batch in schedule.batches() {
        let snapshot: Vec<u32> = delta.par_iter().map(|x| x.load(Ordering::Relaxed)).collect();
        let mut capacity = (8 * batch.len()).max(2 * prev).max(MIN_TABLE);
        let (cands, rounds) = loop {
            let table = ReachPairTable::with_capacity(capacity);
            let mut bag = HashBag::with_params(table.max_pairs(), params.bag)?;
            match run_batch(g, batch, &snapshot, &table, &mut bag) {
                Ok(r) => break r,
                Err(Error::TableOverflow { .. }) => {
                    stats.table_retries += 1;
                    capacity = table.max_pairs() * 2;
                }
                Err(e) => return Err(e),
            }
        };
        cands.par_iter().for_each(|&(u, _, d)| {
            delta[u as usize].fetch_min(d, Ordering::Relaxed);
        });
        if params.trace_delta {
            stats
                .delta_trace
                .push(delta.iter().map(|x| x.load(Ordering::Relaxed)).collect());
        }
        stats.batches += 1;
        stats.rounds += rounds;
        prev = cands.len();
        all.extend(cands);
    }
    stats.candidates = all.len();

    all.par_sort_unstable_by_key(|&(u, s, d)| (u, rank[s as usize], d));
    let mut starts = vec![0usize; n + 1];
    for &(u, _, _) in &all {
        starts[u as usize + 1] += 1;
    }
    for v in 0..n {
        starts[v + 1] += starts[v];
    }
    let lists = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut c: Vec<(VertexId, u32)> = all[starts[v]..starts[v + 1]]
                .iter()
                .map(|&(_, s, d)| (s, d))
                .collect();
            filter_candidates(&mut c, &rank)
        })
        .collect();
    Ok(LeResult { lists, stats })
}

/// Checks the per-list structure: priorities strictly increase while
/// distances strictly decrease, ending with the vertex itself at distance 0.
pub fn check_list(v: VertexId, list: &[(VertexId, u32)], rank: &[u32]) -> bool {
    list.last() == Some(&(v, 0))
        && list
            .windows(2)
            .all(|w| rank[w[0].0 as usize] < rank[w[1].0 as usize] && w[0].1 > w[1].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_examples() {
        let rank = [0, 1, 2];
        assert_eq!(filter_candidates(&mut [(0, 3), (1, 3)], &rank), vec![(0, 3)]);
        assert_eq!(filter_candidates(&mut [(2, 4), (0, 5), (1, 2)], &rank), vec![(0, 5), (1, 2)]);
        let valid = vec![(0, 4), (1, 2), (2, 0)];
        assert_eq!(filter_candidates(&mut valid.clone(), &rank), valid);
        assert_eq!(filter_candidates(&mut [(1, 2), (1, 2), (1, 5)], &rank), vec![(1, 2)]);
    }

    #[test]
    fn path_of_three_and_single_vertex() {
        let g = Graph::undirected_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let r = run_lelists(&g, &[0, 1, 2], &LeParams::default()).unwrap();
        assert_eq!(r.lists, vec![vec![(0, 0)], vec![(0, 1), (1, 0)], vec![(0, 2), (1, 1), (2, 0)]]);
        let one = Graph::undirected_from_edges(1, &[]).unwrap();
        assert_eq!(run_lelists(&one, &[0], &LeParams::default()).unwrap().lists, vec![vec![(0, 0)]]);
    }

    #[test]
    fn bad_orders_rejected() {
        let g = Graph::undirected_from_edges(3, &[(0, 1)]).unwrap();
        assert!(run_lelists(&g, &[0, 1], &LeParams::default()).is_err());
        assert!(run_lelists(&g, &[0, 1, 1], &LeParams::default()).is_err());
        assert!(run_lelists(&g, &[0, 1, 7], &LeParams::default()).is_err());
    }
}
