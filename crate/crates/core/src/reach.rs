//! Reachability searches with vertical granularity control.
//!
//! A round processes every frontier vertex in parallel. A vertex with fewer
//! than `τ` out-neighbors runs a sequential *local search*: a bounded BFS
//! through a task-local queue that keeps going across hops until `τ` neighbor
//! visits (successful or not) have been spent. Whatever is still queued when
//! the budget runs out goes to the next frontier, which lives in a
//! [`HashBag`]. Vertices with at least `τ` out-neighbors scan them in
//! parallel instead.
//!
//! When the frontier's out-degree sum exceeds `m/θ`, a round runs in dense
//! (pull) mode instead: every candidate vertex scans its in-neighbors.
//!
//! Multi-source searches use a [`ReachPairTable`] as the dedup authority.
//! Each vertex also has a `pending` flag that hands out one processing token
//! at a time: whoever newly inserts a pair for `u` and flips `pending[u]`
//! from false to true must make sure `u` gets processed. Processing clears
//! the flag before reading the vertex's sources, so a pair that arrives after
//! that read always triggers another visit.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeView, VertexId};
use crate::hashbag::{BagParams, HashBag};
use crate::pairs::ReachPairTable;

/// Local-search budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VgcParams {
    /// Maximum neighbor visits per local search.
    pub tau: usize,
    pub enabled: bool,
}

impl Default for VgcParams {
    fn default() -> Self {
        Self {
            tau: 512,
            enabled: true,
        }
    }
}

impl VgcParams {
    pub fn with_tau(tau: usize) -> Self {
        Self { tau, enabled: true }
    }

    pub fn disabled() -> Self {
        Self {
            tau: 1,
            enabled: false,
        }
    }

    /// The budget actually used: `1` (plain BFS) when disabled.
    pub fn effective_tau(&self) -> usize {
        if self.enabled {
            self.tau.max(1)
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::InvalidParameter("tau must be at least 1".into()));
        }
        Ok(())
    }
}

/// Frontier representation policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DenseMode {
    #[default]
    Auto,
    ForceSparse,
    ForceDense,
}

/// Everything a search needs besides the graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReachParams {
    pub vgc: VgcParams,
    pub dense: DenseMode,
    /// Go dense when the frontier's out-degree sum exceeds `m / theta`.
    pub theta: f64,
    pub bag: BagParams,
}

impl Default for ReachParams {
    fn default() -> Self {
        Self {
            vgc: VgcParams::default(),
            dense: DenseMode::Auto,
            theta: 20.0,
            bag: BagParams::default(),
        }
    }
}

impl ReachParams {
    pub fn with_tau(tau: usize) -> Self {
        Self {
            vgc: VgcParams::with_tau(tau),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.vgc.validate()?;
        self.bag.validate()?;
        if !(self.theta > 0.0) {
            return Err(Error::InvalidParameter("theta must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrontierMode {
    Sparse,
    Dense,
}

impl FrontierMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontierMode::Sparse => "sparse",
            FrontierMode::Dense => "dense",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundStat {
    pub frontier: usize,
    pub mode: FrontierMode,
}

/// Per-search round accounting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub rounds: usize,
    pub per_round: Vec<RoundStat>,
}

impl SearchStats {
    fn record(&mut self, frontier: usize, mode: FrontierMode) {
        self.rounds += 1;
        self.per_round.push(RoundStat { frontier, mode });
    }

    pub fn dense_rounds(&self) -> usize {
        self.per_round
            .iter()
            .filter(|r| r.mode == FrontierMode::Dense)
            .count()
    }
}

/// The set of vertices to expand in a round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frontier {
    Sparse(Vec<VertexId>),
    Dense { flags: Vec<bool>, size: usize },
}

impl Frontier {
    pub fn empty() -> Self {
        Frontier::Sparse(Vec::new())
    }

    pub fn len(&self) -> usize {
        match self {
            Frontier::Sparse(v) => v.len(),
            Frontier::Dense { size, .. } => *size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> FrontierMode {
        match self {
            Frontier::Sparse(_) => FrontierMode::Sparse,
            Frontier::Dense { .. } => FrontierMode::Dense,
        }
    }

    /// Members in increasing id order for dense frontiers, insertion order otherwise.
    pub fn to_vec(&self) -> Vec<VertexId> {
        match self {
            Frontier::Sparse(v) => v.clone(),
            Frontier::Dense { flags, .. } => dense_members(flags),
        }
    }

    fn into_sparse(self) -> Vec<VertexId> {
        match self {
            Frontier::Sparse(v) => v,
            Frontier::Dense { flags, .. } => dense_members(&flags),
        }
    }

    fn into_dense(self, n: usize) -> (Vec<bool>, usize) {
        match self {
            Frontier::Dense { flags, size } => (flags, size),
            Frontier::Sparse(v) => {
                let mut flags = vec![false; n];
                for &x in &v {
                    flags[x as usize] = true;
                }
                (flags, v.len())
            }
        }
    }
}

fn dense_members(flags: &[bool]) -> Vec<VertexId> {
    flags
        .par_iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i as VertexId))
        .collect()
}

/// Sum of out-degrees over the frontier.
pub fn frontier_out_degree(view: EdgeView<'_>, frontier: &Frontier) -> usize {
    match frontier {
        Frontier::Sparse(v) => v.par_iter().map(|&x| view.out.degree(x)).sum(),
        Frontier::Dense { flags, .. } => flags
            .par_iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| view.out.degree(i as VertexId))
            .sum(),
    }
}

fn wants_dense(view: EdgeView<'_>, frontier: &Frontier, params: &ReachParams) -> bool {
    match params.dense {
        DenseMode::ForceDense => true,
        DenseMode::ForceSparse => false,
        DenseMode::Auto => {
            let work = frontier_out_degree(view, frontier) as f64;
            work > view.num_edges() as f64 / params.theta
        }
    }
}

/// Picks the representation for the next round: dense above the `m/θ`
/// out-degree threshold, sparse below it.
pub fn maybe_densify(view: EdgeView<'_>, frontier: Frontier, params: &ReachParams) -> Frontier {
    if wants_dense(view, &frontier, params) {
        let (flags, size) = frontier.into_dense(view.num_vertices());
        Frontier::Dense { flags, size }
    } else {
        Frontier::Sparse(frontier.into_sparse())
    }
}

/// Task-local queue for a local search. Holds at most `τ + 1` vertices: the
/// seed plus one per successful visit, and every visit spends budget.
#[derive(Debug)]
pub struct LocalQueue {
    buf: VecDeque<VertexId>,
    /// Neighbor visits spent in the current search.
    pub visits: usize,
}

impl LocalQueue {
    pub fn new(tau: usize) -> Self {
        Self {
            buf: VecDeque::with_capacity(tau + 1),
            visits: 0,
        }
    }

    fn reset(&mut self, seed: VertexId) {
        self.buf.clear();
        self.buf.push_back(seed);
        self.visits = 0;
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }
}

#[inline]
fn claim(flag: &AtomicBool) -> bool {
    !flag.load(Ordering::Relaxed)
        && flag
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Relaxed)
            .is_ok()
}

// ---------------------------------------------------------------------------
// Single-source searches
// ---------------------------------------------------------------------------

/// Expands one frontier vertex of a single-source search.
///
/// `keep(x, u)` filters edges; `on_visit(x, u)` runs once for every vertex
/// `u` claimed through edge `(x, u)`.
pub fn process_frontier_vertex<K, V>(
    view: EdgeView<'_>,
    x: VertexId,
    queue: &mut LocalQueue,
    tau: usize,
    visit: &[AtomicBool],
    next: &HashBag<VertexId>,
    keep: &K,
    on_visit: &V,
) -> Result<()>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
    V: Fn(VertexId, VertexId) + Sync,
{
    let nb = view.out.neighbors(x);
    if nb.len() >= tau {
        return nb.par_iter().with_min_len(256).try_for_each(|&u| {
            if keep(x, u) && claim(&visit[u as usize]) {
                on_visit(x, u);
                next.insert(u)?;
            }
            Ok(())
        });
    }

    queue.reset(x);
    'search: while queue.visits < tau {
        let Some(y) = queue.buf.pop_front() else { break };
        for &u in view.out.neighbors(y) {
            if queue.visits == tau {
                // Budget ran out mid-scan: y must be rescanned next round.
                next.insert(y)?;
                break 'search;
            }
            queue.visits += 1;
            if keep(y, u) && claim(&visit[u as usize]) {
                on_visit(y, u);
                queue.buf.push_back(u);
            }
        }
    }
    for &u in &queue.buf {
        next.insert(u)?;
    }
    queue.buf.clear();
    Ok(())
}

/// Round-by-round driver for single-source style searches (plain
/// reachability and LDD label propagation).
pub struct SingleSearch<'a> {
    view: EdgeView<'a>,
    visit: &'a [AtomicBool],
    params: ReachParams,
    bag: HashBag<VertexId>,
    pub stats: SearchStats,
}

impl<'a> SingleSearch<'a> {
    pub fn new(view: EdgeView<'a>, visit: &'a [AtomicBool], params: ReachParams) -> Result<Self> {
        params.validate()?;
        let bag = HashBag::with_params(view.num_vertices(), params.bag)?;
        Ok(Self {
            view,
            visit,
            params,
            bag,
            stats: SearchStats::default(),
        })
    }

    /// Runs one round and returns the next frontier.
    pub fn step<K, V>(&mut self, frontier: Frontier, keep: &K, on_visit: &V) -> Result<Frontier>
    where
        K: Fn(VertexId, VertexId) -> bool + Sync,
        V: Fn(VertexId, VertexId) + Sync,
    {
        let frontier = maybe_densify(self.view, frontier, &self.params);
        self.stats.record(frontier.len(), frontier.mode());
        match frontier {
            Frontier::Sparse(list) => {
                let tau = self.params.vgc.effective_tau();
                let (view, visit, bag) = (self.view, self.visit, &self.bag);
                list.par_iter().try_for_each_init(
                    || LocalQueue::new(tau),
                    |q, &x| process_frontier_vertex(view, x, q, tau, visit, bag, keep, on_visit),
                )?;
                Ok(Frontier::Sparse(self.bag.extract_all()))
            }
            Frontier::Dense { flags, .. } => Ok(self.dense_round(&flags, keep, on_visit)),
        }
    }

    fn dense_round<K, V>(&self, frontier: &[bool], keep: &K, on_visit: &V) -> Frontier
    where
        K: Fn(VertexId, VertexId) -> bool + Sync,
        V: Fn(VertexId, VertexId) + Sync,
    {
        let view = self.view;
        let visit = self.visit;
        let next: Vec<bool> = (0..view.num_vertices())
            .into_par_iter()
            .with_min_len(1024)
            .map(|v| {
                if visit[v].load(Ordering::Relaxed) {
                    return false;
                }
                let v = v as VertexId;
                for &w in view.inn.neighbors(v) {
                    if frontier[w as usize] && keep(w, v) {
                        visit[v as usize].store(true, Ordering::Release);
                        on_visit(w, v);
                        return true;
                    }
                }
                false
            })
            .collect();
        let size = next.par_iter().filter(|&&f| f).count();
        Frontier::Dense { flags: next, size }
    }
}

/// Marks every vertex reachable from `src` along kept edges.
///
/// Flags already set in `visit` act as barriers that are neither entered nor
/// expanded (unless `src` itself is preset, which is allowed).
pub fn single_reach_filtered<K>(
    view: EdgeView<'_>,
    src: VertexId,
    visit: &[AtomicBool],
    params: &ReachParams,
    keep: K,
) -> Result<SearchStats>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    let n = view.num_vertices();
    if src as usize >= n {
        return Err(Error::VertexOutOfRange(src, n));
    }
    if visit.len() != n {
        return Err(Error::InvalidParameter(format!(
            "visit flags sized {} for {n} vertices",
            visit.len()
        )));
    }
    visit[src as usize].store(true, Ordering::Release);
    let mut search = SingleSearch::new(view, visit, *params)?;
    let mut frontier = Frontier::Sparse(vec![src]);
    while !frontier.is_empty() {
        frontier = search.step(frontier, &keep, &|_, _| {})?;
    }
    Ok(search.stats)
}

pub fn single_reach(
    view: EdgeView<'_>,
    src: VertexId,
    visit: &[AtomicBool],
    params: &ReachParams,
) -> Result<SearchStats> {
    single_reach_filtered(view, src, visit, params, |_, _| true)
}

pub fn new_flags(n: usize) -> Vec<AtomicBool> {
    (0..n).map(|_| AtomicBool::new(false)).collect()
}

pub fn flags_to_vec(flags: &[AtomicBool]) -> Vec<bool> {
    flags.iter().map(|f| f.load(Ordering::Acquire)).collect()
}

// ---------------------------------------------------------------------------
// Multi-source searches
// ---------------------------------------------------------------------------

struct MultiCtx<'a, K> {
    view: EdgeView<'a>,
    table: &'a ReachPairTable,
    pending: &'a [AtomicBool],
    next: &'a HashBag<VertexId>,
    keep: &'a K,
    tau: usize,
}

impl<K> MultiCtx<'_, K>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    /// Pushes all of `sources` onto `u`; true if any pair was new.
    #[inline]
    fn propagate(&self, u: VertexId, sources: &[VertexId]) -> Result<bool> {
        let mut fresh = false;
        for &s in sources {
            fresh |= self.table.insert(u, s)?;
        }
        Ok(fresh)
    }

    /// Takes the processing token for `u`; true if the caller now owns it.
    #[inline]
    fn take_token(&self, u: VertexId) -> bool {
        !self.pending[u as usize].swap(true, Ordering::SeqCst)
    }

    fn process(&self, x: VertexId, queue: &mut LocalQueue, sources: &mut Vec<VertexId>) -> Result<()> {
        let nb = self.view.out.neighbors(x);
        if nb.len() >= self.tau {
            self.table.sources_of(x, sources);
            let carried: &[VertexId] = sources;
            return nb.par_iter().with_min_len(256).try_for_each(|&u| {
                if self.keep(x, u) && self.propagate(u, carried)? && self.take_token(u) {
                    self.next.insert(u)?;
                }
                Ok(())
            });
        }

        queue.reset(x);
        'search: while queue.visits < self.tau {
            let Some(y) = queue.buf.pop_front() else { break };
            self.pending[y as usize].store(false, Ordering::SeqCst);
            self.table.sources_of(y, sources);
            for &u in self.view.out.neighbors(y) {
                if queue.visits == self.tau {
                    if self.take_token(y) {
                        self.next.insert(y)?;
                    }
                    break 'search;
                }
                queue.visits += 1;
                if self.keep(y, u) && self.propagate(u, sources)? && self.take_token(u) {
                    queue.buf.push_back(u);
                }
            }
        }
        for &u in &queue.buf {
            self.next.insert(u)?;
        }
        queue.buf.clear();
        Ok(())
    }

    fn keep(&self, x: VertexId, u: VertexId) -> bool {
        (self.keep)(x, u)
    }
}

/// Runs a multi-source reachability search.
///
/// Each `(vertex, label)` in `sources` seeds the pair `(vertex, label)`. On
/// success `table` holds exactly the pairs `(v, s)` such that `v` is reachable
/// from a seed labelled `s` along edges accepted by `keep`. Overflow of the
/// table is reported as [`Error::TableOverflow`]; the caller should retry
/// with a larger, cleared table.
pub fn multi_reach_filtered<K>(
    view: EdgeView<'_>,
    sources: &[(VertexId, VertexId)],
    table: &ReachPairTable,
    params: &ReachParams,
    keep: K,
) -> Result<SearchStats>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    params.validate()?;
    let n = view.num_vertices();
    let pending = new_flags(n);
    let mut seeds = Vec::with_capacity(sources.len());
    for &(v, s) in sources {
        if v as usize >= n {
            return Err(Error::VertexOutOfRange(v, n));
        }
        table.insert(v, s)?;
        if !pending[v as usize].swap(true, Ordering::Relaxed) {
            seeds.push(v);
        }
    }
    let mut bag = HashBag::with_params(n, params.bag)?;
    let mut stats = SearchStats::default();
    let tau = params.vgc.effective_tau();
    let mut frontier = Frontier::Sparse(seeds);

    while !frontier.is_empty() {
        let f = maybe_densify(view, frontier, params);
        stats.record(f.len(), f.mode());
        frontier = match f {
            Frontier::Sparse(list) => {
                list.par_iter()
                    .for_each(|&x| pending[x as usize].store(false, Ordering::SeqCst));
                let ctx = MultiCtx {
                    view,
                    table,
                    pending: &pending,
                    next: &bag,
                    keep: &keep,
                    tau,
                };
                list.par_iter().try_for_each_init(
                    || (LocalQueue::new(tau), Vec::new()),
                    |(q, buf), &x| ctx.process(x, q, buf),
                )?;
                Frontier::Sparse(bag.extract_all())
            }
            Frontier::Dense { flags, .. } => {
                flags.par_iter().enumerate().for_each(|(i, &f)| {
                    if f {
                        pending[i].store(false, Ordering::SeqCst)
                    }
                });
                multi_dense_round(view, table, &flags, &keep)?
            }
        };
    }
    Ok(stats)
}

fn multi_dense_round<K>(
    view: EdgeView<'_>,
    table: &ReachPairTable,
    frontier: &[bool],
    keep: &K,
) -> Result<Frontier>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    let next: Vec<bool> = (0..view.num_vertices())
        .into_par_iter()
        .with_min_len(512)
        .map_init(Vec::new, |buf, v| {
            let v = v as VertexId;
            let mut fresh = false;
            for &w in view.inn.neighbors(v) {
                if frontier[w as usize] && keep(w, v) {
                    table.sources_of(w, buf);
                    for &s in buf.iter() {
                        fresh |= table.insert(v, s)?;
                    }
                }
            }
            Ok(fresh)
        })
        .collect::<Result<_>>()?;
    let size = next.par_iter().filter(|&&f| f).count();
    Ok(Frontier::Dense { flags: next, size })
}

pub fn multi_reach(
    view: EdgeView<'_>,
    sources: &[(VertexId, VertexId)],
    table: &ReachPairTable,
    params: &ReachParams,
) -> Result<SearchStats> {
    multi_reach_filtered(view, sources, table, params, |_, _| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    /// Vertex names for the local-search walkthrough graph.
    const A: u32 = 0;
    const B: u32 = 1;
    const C: u32 = 2;
    const D: u32 = 3;
    const E: u32 = 4;
    const F: u32 = 5;
    const G: u32 = 6;
    const H: u32 = 7;
    const J: u32 = 8;
    const K: u32 = 9;
    const L: u32 = 10;
    const M: u32 = 11;

    fn walkthrough_graph() -> Graph {
        Graph::from_edges(
            12,
            &[
                (A, D),
                (D, B),
                (D, J),
                (J, E),
                (B, E),
                (E, K),
                (E, M),
                (K, L),
                (C, D),
                (C, F),
                (C, G),
                (C, H),
                (M, A),
            ],
        )
        .unwrap()
    }

    #[test]
    fn local_search_walkthrough() {
        let g = walkthrough_graph();
        let view = g.forward();
        let visit = new_flags(12);
        for v in [A, B, C] {
            visit[v as usize].store(true, Ordering::Relaxed);
        }
        let mut bag = HashBag::new(12);
        let mut q = LocalQueue::new(4);
        let keep = |_, _| true;
        let nop = |_, _| {};

        // B first: E, K, M, L spend the budget; M and L are left queued.
        process_frontier_vertex(view, B, &mut q, 4, &visit, &bag, &keep, &nop).unwrap();
        assert_eq!(q.visits, 4);
        // A: D succeeds, D's neighbors B (visited) and J, then J's E fails.
        process_frontier_vertex(view, A, &mut q, 4, &visit, &bag, &keep, &nop).unwrap();
        assert_eq!(q.visits, 4);
        // C has 4 >= tau neighbors: checked directly, D fails, F G H succeed.
        process_frontier_vertex(view, C, &mut q, 4, &visit, &bag, &keep, &nop).unwrap();

        let mut next = bag.extract_all();
        next.sort();
        assert_eq!(next, vec![F, G, H, L, M]);
        for v in [D, E, J, K] {
            assert!(visit[v as usize].load(Ordering::Relaxed));
        }
    }

    #[test]
    fn isolated_vertex_emits_nothing() {
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let visit = new_flags(3);
        let mut bag = HashBag::new(3);
        let mut q = LocalQueue::new(10);
        process_frontier_vertex(g.forward(), 0, &mut q, 10, &visit, &bag, &|_, _| true, &|_, _| {})
            .unwrap();
        assert_eq!(q.visits, 0);
        assert!(bag.extract_all().is_empty());
    }

    #[test]
    fn short_chain_consumed_locally() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let visit = new_flags(4);
        visit[0].store(true, Ordering::Relaxed);
        let mut bag = HashBag::new(4);
        let mut q = LocalQueue::new(10);
        process_frontier_vertex(g.forward(), 0, &mut q, 10, &visit, &bag, &|_, _| true, &|_, _| {})
            .unwrap();
        assert_eq!(q.visits, 3);
        assert!(bag.extract_all().is_empty());
        assert!(visit.iter().all(|f| f.load(Ordering::Relaxed)));
    }

    #[test]
    fn tau_one_is_plain_bfs_step() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 3), (2, 4)]).unwrap();
        let visit = new_flags(5);
        visit[0].store(true, Ordering::Relaxed);
        let mut bag = HashBag::new(5);
        let mut q = LocalQueue::new(1);
        process_frontier_vertex(g.forward(), 0, &mut q, 1, &visit, &bag, &|_, _| true, &|_, _| {})
            .unwrap();
        let mut next = bag.extract_all();
        next.sort();
        assert_eq!(next, vec![1, 2]);
        assert!(!visit[3].load(Ordering::Relaxed));
    }

    #[test]
    fn three_cycle_reaches_all() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let visit = new_flags(3);
        single_reach(g.forward(), 0, &visit, &ReachParams::default()).unwrap();
        assert_eq!(flags_to_vec(&visit), vec![true; 3]);
    }

    #[test]
    fn source_out_of_range() {
        let g = Graph::from_edges(3, &[]).unwrap();
        let visit = new_flags(3);
        assert!(matches!(
            single_reach(g.forward(), 3, &visit, &ReachParams::default()),
            Err(Error::VertexOutOfRange(3, 3))
        ));
    }

    #[test]
    fn densify_thresholds() {
        let edges: Vec<_> = (0..50u32).map(|v| (v, (v + 1) % 50)).collect();
        let g = Graph::from_edges(50, &edges).unwrap();
        let p = ReachParams::default();
        let all = Frontier::Sparse((0..50).collect());
        assert_eq!(maybe_densify(g.forward(), all, &p).mode(), FrontierMode::Dense);
        let one = Frontier::Sparse(vec![3]);
        let f = maybe_densify(g.forward(), one, &p);
        assert_eq!(f, Frontier::Sparse(vec![3]));
        let back = maybe_densify(
            g.forward(),
            Frontier::Dense {
                flags: (0..50).map(|v| v == 7).collect(),
                size: 1,
            },
            &p,
        );
        assert_eq!(back, Frontier::Sparse(vec![7]));
    }

    #[test]
    fn multi_reach_single_source_matches_single_reach() {
        let g = walkthrough_graph();
        let table = ReachPairTable::with_capacity(64);
        multi_reach(g.forward(), &[(B, B)], &table, &ReachParams::with_tau(2)).unwrap();
        let visit = new_flags(12);
        single_reach(g.forward(), B, &visit, &ReachParams::default()).unwrap();
        let mut got: Vec<_> = table.pairs();
        got.sort();
        let expect: Vec<_> = flags_to_vec(&visit)
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(v, _)| (v as u32, B))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn multi_reach_overflow_is_an_error() {
        let edges: Vec<_> = (0..200u32).map(|v| (v, v + 1)).collect();
        let g = Graph::from_edges(201, &edges).unwrap();
        let table = ReachPairTable::with_capacity(16);
        let r = multi_reach(g.forward(), &[(0, 0), (1, 1)], &table, &ReachParams::default());
        assert!(matches!(r, Err(Error::TableOverflow { .. })));
    }
}
