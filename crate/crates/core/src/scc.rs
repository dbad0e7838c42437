//! Strongly connected components by batched reachability (BGSS).
//!
//! 1. Trim: vertices with no in- or no out-edges are singleton SCCs.
//! 2. First SCC: forward and backward single-source searches from a pivot;
//!    the intersection is one SCC and everything else is split by which of
//!    the two searches reached it.
//! 3. The remaining vertices are shuffled and cut into batches whose size
//!    grows by `β`. Each batch seeds a forward and a backward multi-source
//!    search that never crosses an edge between differently labelled
//!    vertices. A vertex reached both ways from a common source joins that
//!    source's SCC; any other vertex folds its two source sets into its label,
//!    so vertices with different reachability end up in different classes.
//!
//! Every finished SCC is labelled by the id of one of its members, so
//! finished labels are distinct across components.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gen::{random_permutation, rng};
use crate::graph::{EdgeView, Graph, VertexId};
use crate::hash::{mix2, mix64};
use crate::pairs::ReachPairTable;
use crate::reach::{
    flags_to_vec, multi_reach_filtered, new_flags, single_reach_filtered, ReachParams, SearchStats,
};

/// Label shared by all alive vertices before any search has split them.
pub const ALIVE_LABEL: u64 = u64::MAX;

const FORWARD_SALT: u64 = 0x243f_6a88_85a3_08d3;
const BACKWARD_SALT: u64 = 0x1319_8a2e_0370_7344;
const MIN_TABLE: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Alive vertex maximizing in-degree times out-degree (ties: lowest id).
    #[default]
    MaxDegree,
    /// Uniformly random alive vertex.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SccParams {
    pub reach: ReachParams,
    /// Batch growth factor.
    pub beta: f64,
    pub pivot: PivotRule,
    pub seed: u64,
}

impl Default for SccParams {
    fn default() -> Self {
        Self {
            reach: ReachParams::default(),
            beta: 1.5,
            pivot: PivotRule::MaxDegree,
            seed: 0,
        }
    }
}

impl SccParams {
    pub fn validate(&self) -> Result<()> {
        self.reach.validate()?;
        if !(self.beta >= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must be >= 1, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Per-vertex component labels. Once `done[v]` is set, `label[v]` is final.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccLabels {
    pub label: Vec<u64>,
    pub done: Vec<bool>,
}

impl SccLabels {
    pub fn new(n: usize) -> Self {
        Self {
            label: vec![ALIVE_LABEL; n],
            done: vec![false; n],
        }
    }

    pub fn num_done(&self) -> usize {
        self.done.par_iter().filter(|&&d| d).count()
    }

    pub fn alive(&self) -> Vec<VertexId> {
        (0..self.done.len() as VertexId)
            .filter(|&v| !self.done[v as usize])
            .collect()
    }

    pub fn num_components(&self) -> usize {
        crate::oracles::count_classes(&self.label)
    }

    pub fn largest_component(&self) -> usize {
        let mut sorted = self.label.clone();
        sorted.par_sort_unstable();
        sorted
            .chunk_by(|a, b| a == b)
            .map(|c| c.len())
            .max()
            .unwrap_or(0)
    }
}

/// Source batches over a vertex order; sizes `1, ceil(β), ceil(β·ceil(β)), ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchSchedule {
    pub order: Vec<VertexId>,
    /// `bounds[i]..bounds[i+1]` is batch `i`.
    pub bounds: Vec<usize>,
}

impl BatchSchedule {
    pub fn new(order: Vec<VertexId>, beta: f64) -> Self {
        let mut bounds = vec![0];
        let mut size = 1usize;
        let mut end = 0usize;
        while end < order.len() {
            end = (end + size).min(order.len());
            bounds.push(end);
            size = ((size as f64 * beta).ceil() as usize).max(size);
        }
        Self { order, bounds }
    }

    pub fn num_batches(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn batch(&self, i: usize) -> &[VertexId] {
        &self.order[self.bounds[i]..self.bounds[i + 1]]
    }

    pub fn batches(&self) -> impl Iterator<Item = &[VertexId]> {
        (0..self.num_batches()).map(|i| self.batch(i))
    }
}

/// Order-independent fold of a vertex's reachability signature into its label.
/// Empty signatures leave the label unchanged.
pub fn signature_hash(old: u64, in_sources: &[VertexId], out_sources: &[VertexId]) -> u64 {
    if in_sources.is_empty() && out_sources.is_empty() {
        return old;
    }
    let fold = |set: &[VertexId], salt: u64| {
        set.iter()
            .fold(0u64, |acc, &s| acc.wrapping_add(mix64(s as u64 ^ salt)))
    };
    let h = mix2(old, fold(in_sources, FORWARD_SALT));
    mix64(mix2(h, fold(out_sources, BACKWARD_SALT)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchStat {
    pub sources: usize,
    pub forward_rounds: usize,
    pub backward_rounds: usize,
    pub finished: usize,
    pub pairs: usize,
    pub table_retries: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SccStats {
    pub trimmed: usize,
    pub pivot: Option<VertexId>,
    pub first_scc_size: usize,
    pub first_forward: SearchStats,
    pub first_backward: SearchStats,
    pub batches: Vec<BatchStat>,
    pub trim_time: Duration,
    pub first_scc_time: Duration,
    pub multi_search_time: Duration,
    pub table_resize_time: Duration,
    pub labeling_time: Duration,
}

impl SccStats {
    pub fn multi_rounds(&self) -> usize {
        self.batches
            .iter()
            .map(|b| b.forward_rounds + b.backward_rounds)
            .sum()
    }

    pub fn total_rounds(&self) -> usize {
        self.first_forward.rounds + self.first_backward.rounds + self.multi_rounds()
    }
}

#[derive(Clone, Debug)]
pub struct SccResult {
    pub labels: SccLabels,
    pub stats: SccStats,
}

/// One pass: every alive vertex with no in-edges or no out-edges becomes its
/// own SCC. Returns the number trimmed.
pub fn trim(g: &Graph, labels: &mut SccLabels) -> usize {
    labels
        .label
        .par_iter_mut()
        .zip(labels.done.par_iter_mut())
        .enumerate()
        .map(|(v, (l, d))| {
            let v = v as VertexId;
            if !*d && (g.out_neighbors(v).is_empty() || g.in_neighbors(v).is_empty()) {
                *d = true;
                *l = v as u64;
                1
            } else {
                0
            }
        })
        .sum()
}

pub fn choose_pivot(g: &Graph, labels: &SccLabels, rule: PivotRule, seed: u64) -> Option<VertexId> {
    match rule {
        PivotRule::MaxDegree => (0..g.num_vertices() as VertexId)
            .into_par_iter()
            .filter(|&v| !labels.done[v as usize])
            .map(|v| {
                let w = g.out_neighbors(v).len() as u128 * g.in_neighbors(v).len() as u128;
                (w, std::cmp::Reverse(v))
            })
            .max()
            .map(|(_, std::cmp::Reverse(v))| v),
        PivotRule::Random => {
            let alive = labels.alive();
            if alive.is_empty() {
                None
            } else {
                Some(alive[rng(seed).gen_range(0..alive.len())])
            }
        }
    }
}

/// Forward and backward searches from the pivot; their intersection becomes
/// one finished SCC labelled by the pivot.
pub fn first_scc(g: &Graph, labels: &mut SccLabels, params: &SccParams, stats: &mut SccStats) -> Result<()> {
    let Some(pivot) = choose_pivot(g, labels, params.pivot, params.seed) else {
        return Ok(());
    };
    stats.pivot = Some(pivot);
    let n = g.num_vertices();
    let done = &labels.done;
    let keep = |_: VertexId, u: VertexId| !done[u as usize];
    let fwd = new_flags(n);
    let bwd = new_flags(n);
    stats.first_forward = single_reach_filtered(g.forward(), pivot, &fwd, &params.reach, keep)?;
    stats.first_backward = single_reach_filtered(g.backward(), pivot, &bwd, &params.reach, keep)?;
    let (fwd, bwd) = (flags_to_vec(&fwd), flags_to_vec(&bwd));
    let p = [pivot];
    stats.first_scc_size = labels
        .label
        .par_iter_mut()
        .zip(labels.done.par_iter_mut())
        .enumerate()
        .map(|(v, (l, d))| {
            if *d {
                return 0;
            }
            match (fwd[v], bwd[v]) {
                (true, true) => {
                    *d = true;
                    *l = pivot as u64;
                    1
                }
                (f, b) => {
                    let ins: &[VertexId] = if f { &p } else { &[] };
                    let outs: &[VertexId] = if b { &p } else { &[] };
                    *l = signature_hash(*l, ins, outs);
                    0
                }
            }
        })
        .sum();
    Ok(())
}

/// Runs a multi-source search, growing the table until it fits.
fn multi_with_retry(
    view: EdgeView<'_>,
    sources: &[(VertexId, VertexId)],
    labels: &SccLabels,
    params: &ReachParams,
    mut capacity: usize,
    retries: &mut usize,
    resize_time: &mut Duration,
) -> Result<(ReachPairTable, SearchStats)> {
    let (label, done) = (&labels.label, &labels.done);
    let keep = |x: VertexId, u: VertexId| !done[u as usize] && label[x as usize] == label[u as usize];
    loop {
        let t0 = Instant::now();
        let table = ReachPairTable::with_capacity(capacity);
        *resize_time += t0.elapsed();
        match multi_reach_filtered(view, sources, &table, params, keep) {
            Ok(stats) => return Ok((table, stats)),
            Err(Error::TableOverflow { .. }) => {
                *retries += 1;
                capacity = table.max_pairs() * 2;
            }
            Err(e) => return Err(e),
        }
    }
}

pub fn run_scc(g: &Graph, params: &SccParams) -> Result<SccResult> {
    params.validate()?;
    let n = g.num_vertices();
    let mut labels = SccLabels::new(n);
    let mut stats = SccStats::default();

    let t = Instant::now();
    stats.trimmed = trim(g, &mut labels);
    stats.trim_time = t.elapsed();

    let t = Instant::now();
    first_scc(g, &mut labels, params, &mut stats)?;
    stats.first_scc_time = t.elapsed();

    let alive = labels.alive();
    let perm = random_permutation(alive.len(), params.seed ^ 0x5cc5_eed);
    let order = perm.iter().map(|&i| alive[i as usize]).collect();
    let schedule = BatchSchedule::new(order, params.beta);

    let mut prev_pairs = 0usize;
    for batch in schedule.batches() {
        let sources: Vec<(VertexId, VertexId)> = batch
            .iter()
            .filter(|&&v| !labels.done[v as usize])
            .map(|&v| (v, v))
            .collect();
        if sources.is_empty() {
            continue;
        }
        let mut bs = BatchStat {
            sources: sources.len(),
            ..BatchStat::default()
        };
        let capacity = (4 * sources.len()).max(2 * prev_pairs).max(MIN_TABLE);

        let t = Instant::now();
        let mut resize = Duration::ZERO;
        let (ft, fs) = multi_with_retry(
            g.forward(),
            &sources,
            &labels,
            &params.reach,
            capacity,
            &mut bs.table_retries,
            &mut resize,
        )?;
        let (bt, bsr) = multi_with_retry(
            g.backward(),
            &sources,
            &labels,
            &params.reach,
            capacity,
            &mut bs.table_retries,
            &mut resize,
        )?;
        stats.table_resize_time += resize;
        stats.multi_search_time += t.elapsed().saturating_sub(resize);
        bs.forward_rounds = fs.rounds;
        bs.backward_rounds = bsr.rounds;
        bs.pairs = ft.len() + bt.len();
        prev_pairs = ft.len().max(bt.len());

        let t = Instant::now();
        bs.finished = labels
            .label
            .par_iter_mut()
            .zip(labels.done.par_iter_mut())
            .enumerate()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(ins, outs): &mut (Vec<VertexId>, Vec<VertexId>), (v, (l, d))| {
                    if *d {
                        return 0;
                    }
                    ft.sources_of(v as VertexId, ins);
                    bt.sources_of(v as VertexId, outs);
                    let common = ins.iter().filter(|s| outs.contains(s)).max();
                    match common {
                        Some(&s) => {
                            *d = true;
                            *l = s as u64;
                            1
                        }
                        None => {
                            ins.sort_unstable();
                            outs.sort_unstable();
                            *l = signature_hash(*l, ins, outs);
                            0
                        }
                    }
                },
            )
            .sum();
        stats.labeling_time += t.elapsed();
        stats.batches.push(bs);
    }

    debug_assert!(labels.done.iter().all(|&d| d));
    Ok(SccResult { labels, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{canonical_partition, tarjan_scc};

    #[test]
    fn trim_one_pass() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut l = SccLabels::new(3);
        assert_eq!(trim(&g, &mut l), 2);
        assert_eq!(l.done, vec![true, false, true]);

        let cyc = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut l = SccLabels::new(3);
        assert_eq!(trim(&cyc, &mut l), 0);

        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let mut l = SccLabels::new(6);
        assert_eq!(trim(&star, &mut l), 6);
    }

    #[test]
    fn first_scc_on_cycle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut l = SccLabels::new(3);
        let mut s = SccStats::default();
        first_scc(&g, &mut l, &SccParams::default(), &mut s).unwrap();
        assert!(l.done.iter().all(|&d| d));
        assert_eq!(l.num_components(), 1);
        assert_eq!(s.first_scc_size, 3);
    }

    #[test]
    fn two_disjoint_two_cycles() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let r = run_scc(&g, &SccParams::default()).unwrap();
        assert_eq!(r.labels.num_components(), 2);
        assert_eq!(canonical_partition(&r.labels.label), canonical_partition(&tarjan_scc(&g)));
    }

    #[test]
    fn signature_properties() {
        assert_eq!(signature_hash(42, &[], &[]), 42);
        assert_eq!(signature_hash(7, &[1, 2, 3], &[9]), signature_hash(7, &[3, 1, 2], &[9]));
        assert_ne!(signature_hash(7, &[1], &[]), signature_hash(7, &[], &[1]));
        assert_ne!(signature_hash(7, &[1, 2], &[]), signature_hash(7, &[1, 3], &[]));
        assert_ne!(signature_hash(7, &[1], &[]), 7);
    }

    #[test]
    fn batch_schedule_sizes() {
        let s = BatchSchedule::new((0..100).collect(), 1.5);
        let sizes: Vec<_> = s.batches().map(|b| b.len()).collect();
        assert_eq!(&sizes[..6], &[1, 2, 3, 5, 8, 12]);
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        let d = BatchSchedule::new((0..15).collect(), 2.0);
        assert_eq!(d.batches().map(|b| b.len()).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
        assert_eq!(BatchSchedule::new(vec![], 1.5).num_batches(), 0);
    }

    #[test]
    fn bad_beta_rejected() {
        let g = Graph::from_edges(2, &[]).unwrap();
        let p = SccParams {
            beta: 0.5,
            ..SccParams::default()
        };
        assert!(run_scc(&g, &p).is_err());
    }
}
