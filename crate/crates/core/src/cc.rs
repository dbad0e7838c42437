//! Connected components: low-diameter decomposition, then union-find over
//! the edges that cross clusters.
//!
//! The decomposition shuffles the vertices and injects them as cluster seeds
//! in batches growing by a factor of 1.2. Each round grows every cluster by
//! one search step (with local search, so often by many hops) and then seeds
//! the next batch's still-unclaimed vertices. Cluster trees plus the edges
//! whose union actually merged two sets form a spanning forest.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gen::random_permutation;
use crate::graph::{Graph, VertexId, NO_VERTEX};
use crate::reach::{new_flags, Frontier, ReachParams, SearchStats, SingleSearch};
use crate::scc::BatchSchedule;
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcParams {
    pub reach: ReachParams,
    /// Seed batch growth factor.
    pub growth: f64,
    pub seed: u64,
}

impl Default for CcParams {
    fn default() -> Self {
        Self {
            reach: ReachParams::default(),
            growth: 1.2,
            seed: 0,
        }
    }
}

impl CcParams {
    pub fn validate(&self) -> Result<()> {
        self.reach.validate()?;
        if !(self.growth >= 1.0) {
            return Err(Error::InvalidParameter(format!("growth must be >= 1, got {}", self.growth)));
        }
        Ok(())
    }
}

/// Cluster assignment from the decomposition.
#[derive(Clone, Debug)]
pub struct Ldd {
    /// Seed vertex of each vertex's cluster.
    pub label: Vec<VertexId>,
    /// Vertex through which each vertex was claimed; `NO_VERTEX` for seeds.
    pub parent: Vec<VertexId>,
    pub stats: SearchStats,
}

impl Ldd {
    pub fn num_clusters(&self) -> usize {
        self.parent.par_iter().filter(|&&p| p == NO_VERTEX).count()
    }
}

fn claim(flag: &AtomicBool) -> bool {
    flag.compare_exchange(false, true, Ordering::AcqRel, Ordering::Relaxed)
        .is_ok()
}

/// Low-diameter decomposition over edges accepted by `keep` (which must be
/// symmetric in its arguments).
pub fn ldd_filtered<K>(g: &Graph, params: &CcParams, keep: K) -> Result<Ldd>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    params.validate()?;
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = g.num_vertices();
    let visit = new_flags(n);
    let label: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(NO_VERTEX)).collect();
    let parent: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(NO_VERTEX)).collect();
    let schedule = BatchSchedule::new(random_permutation(n, params.seed), params.growth);

    let on_visit = |x: VertexId, u: VertexId| {
        label[u as usize].store(label[x as usize].load(Ordering::Acquire), Ordering::Release);
        parent[u as usize].store(x, Ordering::Relaxed);
    };
    let mut search = SingleSearch::new(g.forward(), &visit, params.reach)?;
    let mut frontier = Frontier::empty();
    let mut next_batch = 0;
    loop {
        if next_batch < schedule.num_batches() {
            let seeds: Vec<VertexId> = schedule
                .batch(next_batch)
                .iter()
                .copied()
                .filter(|&v| claim(&visit[v as usize]))
                .collect();
            for &v in &seeds {
                label[v as usize].store(v, Ordering::Relaxed);
            }
            frontier = match frontier {
                Frontier::Sparse(mut list) => {
                    list.extend(seeds);
                    Frontier::Sparse(list)
                }
                Frontier::Dense { mut flags, size } => {
                    for &v in &seeds {
                        flags[v as usize] = true;
                    }
                    Frontier::Dense {
                        flags,
                        size: size + seeds.len(),
                    }
                }
            };
            next_batch += 1;
        } else if frontier.is_empty() {
            break;
        }
        if !frontier.is_empty() {
            frontier = search.step(frontier, &keep, &on_visit)?;
        }
    }
    Ok(Ldd {
        label: label.into_iter().map(AtomicU32::into_inner).collect(),
        parent: parent.into_iter().map(AtomicU32::into_inner).collect(),
        stats: search.stats,
    })
}

pub fn ldd(g: &Graph, params: &CcParams) -> Result<Ldd> {
    ldd_filtered(g, params, |_, _| true)
}

#[derive(Clone, Debug)]
pub struct CcResult {
    /// Each vertex's label is the minimum vertex id of its component.
    pub labels: Vec<VertexId>,
    pub num_components: usize,
    pub num_clusters: usize,
    pub ldd_stats: SearchStats,
    /// Spanning forest edges `(child-side, parent-side)`, when requested.
    pub forest: Option<Vec<(VertexId, VertexId)>>,
}

fn components<K>(g: &Graph, params: &CcParams, keep: K, want_forest: bool) -> Result<CcResult>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    let n = g.num_vertices();
    let ldd = ldd_filtered(g, params, &keep)?;
    let uf = UnionFind::new(n);
    let lab = &ldd.label;
    let merged: Vec<(VertexId, VertexId)> = (0..n as VertexId)
        .into_par_iter()
        .flat_map_iter(|v| {
            let uf = &uf;
            let keep = &keep;
            g.out_neighbors(v).iter().filter_map(move |&u| {
                let (lv, lu) = (lab[v as usize], lab[u as usize]);
                (v < u && lv != lu && keep(v, u) && uf.union(lv, lu)).then_some((v, u))
            })
        })
        .collect();

    // Canonical label: the smallest vertex id of each component.
    let roots = uf.roots();
    let min_of_root: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(NO_VERTEX)).collect();
    (0..n).into_par_iter().for_each(|v| {
        let r = roots[lab[v] as usize];
        min_of_root[r as usize].fetch_min(v as VertexId, Ordering::Relaxed);
    });
    let labels: Vec<VertexId> = (0..n)
        .into_par_iter()
        .map(|v| min_of_root[roots[lab[v] as usize] as usize].load(Ordering::Relaxed))
        .collect();
    let num_components = labels
        .par_iter()
        .enumerate()
        .filter(|&(v, &l)| l == v as VertexId)
        .count();

    let forest = want_forest.then(|| {
        let mut f: Vec<(VertexId, VertexId)> = ldd
            .parent
            .par_iter()
            .enumerate()
            .filter(|&(_, &p)| p != NO_VERTEX)
            .map(|(v, &p)| (v as VertexId, p))
            .collect();
        f.extend(merged);
        f
    });
    Ok(CcResult {
        labels,
        num_components,
        num_clusters: ldd.num_clusters(),
        ldd_stats: ldd.stats,
        forest,
    })
}

pub fn run_cc(g: &Graph, params: &CcParams) -> Result<CcResult> {
    components(g, params, |_, _| true, false)
}

/// Components of the subgraph of edges accepted by `keep` (symmetric).
pub fn run_cc_filtered<K>(g: &Graph, params: &CcParams, keep: K) -> Result<CcResult>
where
    K: Fn(VertexId, VertexId) -> bool + Sync,
{
    components(g, params, keep, false)
}

/// Components plus a spanning forest of `g`.
pub fn run_cc_with_forest(g: &Graph, params: &CcParams) -> Result<CcResult> {
    components(g, params, |_, _| true, true)
}
