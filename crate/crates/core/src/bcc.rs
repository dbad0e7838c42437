//! Biconnected components by vertex labeling.
//!
//! A spanning forest comes from connectivity, is rooted at each tree's
//! minimum vertex and flattened by an Euler tour. For every vertex, `low` and
//! `high` are the smallest and largest tour positions reachable from its
//! subtree through one non-tree edge. A tree edge `(p, c)` is critical when
//! nothing in `c`'s subtree reaches outside `p`'s subtree. Connectivity over
//! the graph minus back edges and critical edges then labels every vertex;
//! each label plus the parent endpoint of its critical edge (the label's
//! head) is one biconnected component. Roots end up alone and unlabelled.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cc::{run_cc_filtered, run_cc_with_forest, CcParams};
use crate::error::{Error, Result};
use crate::euler::{euler_tour, EulerTour};
use crate::graph::{Graph, VertexId, NO_VERTEX};
use crate::oracles::BccSummary;
use crate::sparse_table::{max_table, min_table};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningForest {
    /// Parent of each vertex; `NO_VERTEX` for roots.
    pub parent: Vec<VertexId>,
    /// Tree edges as `(child, parent)`.
    pub edges: Vec<(VertexId, VertexId)>,
}

/// A spanning forest of `g` rooted at each tree's minimum id, with its tour.
pub fn spanning_forest(g: &Graph, params: &CcParams) -> Result<(SpanningForest, EulerTour)> {
    let cc = run_cc_with_forest(g, params)?;
    let raw = cc.forest.expect("forest requested");
    let tour = euler_tour(g.num_vertices(), &raw);
    let edges = (0..g.num_vertices() as VertexId)
        .filter(|&v| tour.parent[v as usize] != NO_VERTEX)
        .map(|v| (v, tour.parent[v as usize]))
        .collect();
    Ok((
        SpanningForest {
            parent: tour.parent.clone(),
            edges,
        },
        tour,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowHigh {
    pub w1: Vec<usize>,
    pub w2: Vec<usize>,
    pub low: Vec<usize>,
    pub high: Vec<usize>,
}

#[inline]
fn is_tree_edge(tour: &EulerTour, u: VertexId, v: VertexId) -> bool {
    tour.parent[u as usize] == v || tour.parent[v as usize] == u
}

pub fn compute_low_high(g: &Graph, tour: &EulerTour) -> LowHigh {
    let n = g.num_vertices();
    let (w1, w2): (Vec<usize>, Vec<usize>) = (0..n as VertexId)
        .into_par_iter()
        .map(|v| {
            let f = tour.first[v as usize];
            g.out_neighbors(v)
                .iter()
                .filter(|&&u| !is_tree_edge(tour, u, v))
                .fold((f, f), |(lo, hi), &u| {
                    let fu = tour.first[u as usize];
                    (lo.min(fu), hi.max(fu))
                })
        })
        .unzip();
    let mins = min_table(tour.order.par_iter().map(|&v| w1[v as usize]).collect());
    let maxs = max_table(tour.order.par_iter().map(|&v| w2[v as usize]).collect());
    let (low, high) = (0..n)
        .into_par_iter()
        .map(|v| {
            let (f, l) = (tour.first[v], tour.last[v]);
            (mins.query(f, l), maxs.query(f, l))
        })
        .unzip();
    LowHigh { w1, w2, low, high }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Tree { critical: bool },
    Back,
    Cross,
}

pub fn classify_edge(tour: &EulerTour, lh: &LowHigh, u: VertexId, v: VertexId) -> EdgeKind {
    if is_tree_edge(tour, u, v) {
        let (p, c) = if tour.parent[v as usize] == u { (u, v) } else { (v, u) };
        let (p, c) = (p as usize, c as usize);
        EdgeKind::Tree {
            critical: lh.low[c] >= tour.first[p] && lh.high[c] <= tour.last[p],
        }
    } else if tour.is_ancestor(u, v) || tour.is_ancestor(v, u) {
        EdgeKind::Back
    } else {
        EdgeKind::Cross
    }
}

/// BCC output: every labelled vertex set plus its head is one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcLabeling {
    /// Per-vertex label (a vertex id); `NO_VERTEX` for tree roots.
    pub label: Vec<VertexId>,
    /// Head of each label, indexed by label; `NO_VERTEX` where unused.
    pub head: Vec<VertexId>,
}

impl BcLabeling {
    /// Component vertex sets (label members plus head), sorted.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut groups: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for (v, &l) in self.label.iter().enumerate() {
            if l != NO_VERTEX {
                groups.entry(l).or_default().push(v as VertexId);
            }
        }
        let mut out: Vec<Vec<VertexId>> = groups
            .into_iter()
            .filter(|(l, _)| self.head[*l as usize] != NO_VERTEX)
            .map(|(l, mut members)| {
                members.push(self.head[l as usize]);
                members.sort_unstable();
                members
            })
            .collect();
        out.sort();
        out
    }

    pub fn num_labels(&self) -> usize {
        self.head.iter().filter(|&&h| h != NO_VERTEX).count()
    }

    /// Vertices lying in at least two components: a vertex belongs to its own
    /// label's component and to every component it heads.
    pub fn articulation_points(&self) -> Vec<VertexId> {
        let n = self.label.len();
        let mut count: Vec<u32> = (0..n)
            .map(|v| {
                let l = self.label[v];
                (l != NO_VERTEX && self.head[l as usize] != NO_VERTEX) as u32
            })
            .collect();
        for &h in &self.head {
            if h != NO_VERTEX {
                count[h as usize] += 1;
            }
        }
        (0..n as VertexId).filter(|&v| count[v as usize] >= 2).collect()
    }

    /// Two-vertex components, as `(min, max)` pairs.
    pub fn bridges(&self) -> Vec<(VertexId, VertexId)> {
        self.components()
            .into_iter()
            .filter(|c| c.len() == 2)
            .map(|c| (c[0], c[1]))
            .collect()
    }

    pub fn summary(&self) -> BccSummary {
        let mut s = BccSummary {
            components: self.components(),
            articulation_points: self.articulation_points(),
            bridges: self.bridges(),
        };
        s.normalize();
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct BccStats {
    pub first_cc_time: Duration,
    pub euler_tour_time: Duration,
    pub low_high_time: Duration,
    pub last_cc_time: Duration,
    pub tree_edges: usize,
    pub critical_edges: usize,
    pub back_edges: usize,
    pub cross_edges: usize,
    pub first_cc_rounds: usize,
    pub last_cc_rounds: usize,
}

#[derive(Clone, Debug)]
pub struct BccResult {
    pub labeling: BcLabeling,
    pub stats: BccStats,
}

pub fn run_bcc(g: &Graph, params: &CcParams) -> Result<BccResult> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = g.num_vertices();
    let mut stats = BccStats::default();

    let t = Instant::now();
    let cc = run_cc_with_forest(g, params)?;
    stats.first_cc_time = t.elapsed();
    stats.first_cc_rounds = cc.ldd_stats.rounds;

    let t = Instant::now();
    let forest = cc.forest.expect("forest requested");
    let tour = euler_tour(n, &forest);
    stats.euler_tour_time = t.elapsed();

    let t = Instant::now();
    let lh = compute_low_high(g, &tour);
    stats.low_high_time = t.elapsed();

    let t = Instant::now();
    let keep = |u: VertexId, v: VertexId| match classify_edge(&tour, &lh, u, v) {
        EdgeKind::Tree { critical } => !critical,
        EdgeKind::Back => false,
        EdgeKind::Cross => true,
    };
    let last = run_cc_filtered(g, params, keep)?;
    stats.last_cc_rounds = last.ldd_stats.rounds;
    let mut head = vec![NO_VERTEX; n];
    for c in 0..n {
        let p = tour.parent[c];
        if p != NO_VERTEX {
            // A critical edge inside one final group (its child subtree joins a
            // sibling subtree through a cross edge) is not a component boundary.
            let crossing = last.labels[c] != last.labels[p as usize];
            if crossing && classify_edge(&tour, &lh, p, c as VertexId) == (EdgeKind::Tree { critical: true }) {
                head[last.labels[c] as usize] = p;
            }
        }
    }
    let label = (0..n)
        .map(|v| {
            if tour.parent[v] == NO_VERTEX {
                NO_VERTEX
            } else {
                last.labels[v]
            }
        })
        .collect();
    stats.last_cc_time = t.elapsed();

    for (u, v) in g.undirected_edges() {
        match classify_edge(&tour, &lh, u, v) {
            EdgeKind::Tree { critical } => {
                stats.tree_edges += 1;
                stats.critical_edges += critical as usize;
            }
            EdgeKind::Back => stats.back_edges += 1,
            EdgeKind::Cross => stats.cross_edges += 1,
        }
    }
    Ok(BccResult {
        labeling: BcLabeling { label, head },
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::hopcroft_tarjan_bcc;

    fn undirected(n: usize, e: &[(u32, u32)]) -> Graph {
        Graph::undirected_from_edges(n, e).unwrap()
    }

    #[test]
    fn triangle() {
        let g = undirected(3, &[(0, 1), (1, 2), (2, 0)]);
        let r = run_bcc(&g, &CcParams::default()).unwrap();
        assert_eq!(r.labeling.components(), vec![vec![0, 1, 2]]);
        assert!(r.labeling.articulation_points().is_empty());
        assert!(r.labeling.bridges().is_empty());
    }

    #[test]
    fn path_of_three() {
        let g = undirected(3, &[(0, 1), (1, 2)]);
        let l = run_bcc(&g, &CcParams::default()).unwrap().labeling;
        assert_eq!(l.components(), vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(l.articulation_points(), vec![1]);
        assert_eq!(l.bridges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn cycle_has_no_cut_structure() {
        let e: Vec<_> = (0..8u32).map(|v| (v, (v + 1) % 8)).collect();
        let l = run_bcc(&undirected(8, &e), &CcParams::default()).unwrap().labeling;
        assert_eq!(l.components().len(), 1);
        assert!(l.articulation_points().is_empty() && l.bridges().is_empty());
    }

    #[test]
    fn bare_tree_low_is_first() {
        let e = [(0, 1), (1, 2), (1, 3), (0, 4)];
        let g = undirected(5, &e);
        let (_, tour) = spanning_forest(&g, &CcParams::default()).unwrap();
        let lh = compute_low_high(&g, &tour);
        for v in 0..5 {
            assert_eq!(lh.low[v], tour.first[v]);
            let sub_max = (0..5).filter(|&u| tour.is_ancestor(v as u32, u as u32)).map(|u| tour.first[u]).max();
            assert_eq!(Some(lh.high[v]), sub_max);
        }
    }

    #[test]
    fn three_cycle_leaf_reaches_root() {
        // Tree 0-1-2 rooted at 0; the closing edge (2, 0) is a back edge.
        let g = undirected(3, &[(0, 1), (1, 2), (2, 0)]);
        let tour = euler_tour(3, &[(0, 1), (1, 2)]);
        let lh = compute_low_high(&g, &tour);
        assert_eq!(lh.low[2], tour.first[0]);
        assert_eq!(lh.low[1], tour.first[0]);
        assert_eq!(classify_edge(&tour, &lh, 2, 0), EdgeKind::Back);
        assert_eq!(classify_edge(&tour, &lh, 0, 1), EdgeKind::Tree { critical: true });
        assert_eq!(classify_edge(&tour, &lh, 1, 2), EdgeKind::Tree { critical: false });
    }

    #[test]
    fn two_triangles_sharing_a_vertex() {
        let g = undirected(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        let l = run_bcc(&g, &CcParams::default()).unwrap().labeling;
        assert_eq!(l.summary(), hopcroft_tarjan_bcc(&g));
        assert_eq!(l.articulation_points(), vec![2]);
    }
}
