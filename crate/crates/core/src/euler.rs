//! Euler tours of spanning forests.
//!
//! Every forest edge becomes two arcs. The successor of arc `(u, v)` is the
//! arc leaving `v` right after `(v, u)` in `v`'s sorted arc list (wrapping
//! around), which links each tree's arcs into one circuit. Each circuit is cut
//! open just before the first arc of its root (the tree's minimum vertex id)
//! and ranked by pointer jumping.
//!
//! Tour positions: a tree with `k` vertices occupies `2(k-1)+1` consecutive
//! slots of `order`, starting with its root; slot `t+1` holds the target of
//! the tree's `t`-th arc. `first[v]..=last[v]` spans exactly `v`'s subtree.

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::graph::{VertexId, NO_VERTEX};
use crate::unionfind::UnionFind;

const NIL: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTour {
    pub order: Vec<VertexId>,
    pub first: Vec<usize>,
    pub last: Vec<usize>,
    /// Parent in the rooted forest; `NO_VERTEX` for roots.
    pub parent: Vec<VertexId>,
    /// Root (minimum id) of each vertex's tree.
    pub root: Vec<VertexId>,
}

impl EulerTour {
    pub fn is_ancestor(&self, a: VertexId, d: VertexId) -> bool {
        let (a, d) = (a as usize, d as usize);
        self.first[a] <= self.first[d] && self.last[d] <= self.last[a]
    }
}

/// Ranks a successor list: returns the number of elements after each one.
pub fn list_rank(succ: &[usize]) -> Vec<usize> {
    let mut next = succ.to_vec();
    let mut dist: Vec<usize> = succ.par_iter().map(|&s| (s != NIL) as usize).collect();
    loop {
        if next.par_iter().all(|&s| s == NIL) {
            return dist;
        }
        let (nd, nn): (Vec<usize>, Vec<usize>) = (0..succ.len())
            .into_par_iter()
            .map(|i| match next[i] {
                NIL => (dist[i], NIL),
                j => (dist[i] + dist[j], next[j]),
            })
            .unzip();
        dist = nd;
        next = nn;
    }
}

/// Builds the Euler tour of the forest on `n` vertices given by `edges`
/// (each undirected tree edge listed once, in either direction).
pub fn euler_tour(n: usize, edges: &[(VertexId, VertexId)]) -> EulerTour {
    // Tree roots: the minimum id of each tree.
    let uf = UnionFind::new(n);
    edges.par_iter().for_each(|&(u, v)| {
        uf.union(u, v);
    });
    let rep = uf.roots();
    let min_of: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(NO_VERTEX)).collect();
    (0..n).into_par_iter().for_each(|v| {
        min_of[rep[v] as usize].fetch_min(v as VertexId, Ordering::Relaxed);
    });
    let root: Vec<VertexId> = (0..n)
        .into_par_iter()
        .map(|v| min_of[rep[v] as usize].load(Ordering::Relaxed))
        .collect();

    // Tree sizes and each tree's base offset in `order`, in root order.
    let size: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(0)).collect();
    root.par_iter().for_each(|&r| {
        size[r as usize].fetch_add(1, Ordering::Relaxed);
    });
    let mut base = vec![0usize; n];
    let mut total = 0usize;
    for r in 0..n {
        let k = size[r].load(Ordering::Relaxed) as usize;
        if k > 0 {
            base[r] = total;
            total += 2 * (k - 1) + 1;
        }
    }

    let mut arcs: Vec<(VertexId, VertexId)> = edges
        .par_iter()
        .flat_map_iter(|&(u, v)| [(u, v), (v, u)])
        .collect();
    arcs.par_sort_unstable();
    let mut start = vec![0usize; n + 1];
    for &(u, _) in &arcs {
        start[u as usize + 1] += 1;
    }
    for v in 0..n {
        start[v + 1] += start[v];
    }
    let find = |u: VertexId, v: VertexId| -> usize {
        let lo = start[u as usize];
        lo + arcs[lo..start[u as usize + 1]]
            .binary_search(&(u, v))
            .expect("arc list is symmetric")
    };
    let succ: Vec<usize> = arcs
        .par_iter()
        .map(|&(u, v)| {
            let back = find(v, u);
            let next = if back + 1 < start[v as usize + 1] {
                back + 1
            } else {
                start[v as usize]
            };
            let r = root[v as usize] as usize;
            if next == start[r] && v as usize == r {
                NIL
            } else {
                next
            }
        })
        .collect();
    let dist = list_rank(&succ);

    // Tour index of arc i inside its tree.
    let tour_index = |i: usize| {
        let r = root[arcs[i].0 as usize] as usize;
        let arcs_in_tree = 2 * (size[r].load(Ordering::Relaxed) as usize - 1);
        (arcs_in_tree - 1 - dist[i], base[r])
    };

    let order: Vec<AtomicU32> = (0..total).map(|_| AtomicU32::new(NO_VERTEX)).collect();
    let first: Vec<std::sync::atomic::AtomicUsize> =
        (0..n).map(|_| std::sync::atomic::AtomicUsize::new(0)).collect();
    let last: Vec<std::sync::atomic::AtomicUsize> =
        (0..n).map(|_| std::sync::atomic::AtomicUsize::new(0)).collect();
    let parent: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(NO_VERTEX)).collect();

    (0..n).into_par_iter().for_each(|v| {
        if root[v] as usize == v {
            let b = base[v];
            order[b].store(v as VertexId, Ordering::Relaxed);
            first[v].store(b, Ordering::Relaxed);
            let k = size[v].load(Ordering::Relaxed) as usize;
            last[v].store(b + 2 * (k - 1), Ordering::Relaxed);
        }
    });
    (0..arcs.len()).into_par_iter().for_each(|i| {
        let (u, v) = arcs[i];
        let (t, b) = tour_index(i);
        order[b + t + 1].store(v, Ordering::Relaxed);
        if u < v {
            let (t2, _) = tour_index(find(v, u));
            // The earlier arc goes down from parent to child.
            let (p, c, down, up) = if t < t2 { (u, v, t, t2) } else { (v, u, t2, t) };
            parent[c as usize].store(p, Ordering::Relaxed);
            first[c as usize].store(b + down + 1, Ordering::Relaxed);
            last[c as usize].store(b + up, Ordering::Relaxed);
        }
    });

    EulerTour {
        order: order.into_iter().map(AtomicU32::into_inner).collect(),
        first: first.into_iter().map(|a| a.into_inner()).collect(),
        last: last.into_iter().map(|a| a.into_inner()).collect(),
        parent: parent.into_iter().map(AtomicU32::into_inner).collect(),
        root,
    }
}

/// Checks that `tour` is a valid Euler tour of the forest `edges`: each
/// tree's segment walks every arc exactly once and intervals are laminar
/// and consistent with the parent pointers.
pub fn validate_tour(n: usize, edges: &[(VertexId, VertexId)], tour: &EulerTour) -> Result<(), String> {
    use std::collections::BTreeSet;
    let want: BTreeSet<(VertexId, VertexId)> =
        edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    let mut seen = BTreeSet::new();
    for w in tour.order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if tour.root[a as usize] != tour.root[b as usize] {
            continue; // boundary between trees
        }
        if !seen.insert((a, b)) {
            return Err(format!("arc ({a},{b}) walked twice"));
        }
    }
    if seen != want {
        return Err("walked arcs differ from forest arcs".into());
    }
    for v in 0..n {
        let (f, l) = (tour.first[v], tour.last[v]);
        if f > l || tour.order[f] as usize != v || tour.order[l] as usize != v {
            return Err(format!("bad interval for {v}: {f}..={l}"));
        }
        let p = tour.parent[v];
        if p == NO_VERTEX {
            if tour.root[v] as usize != v {
                return Err(format!("{v} has no parent but is not a root"));
            }
        } else {
            let (pf, pl) = (tour.first[p as usize], tour.last[p as usize]);
            if !(pf < f && l < pl) {
                return Err(format!("{v}'s interval not nested in parent {p}'s"));
            }
        }
        let span = &tour.order[f..=l];
        let inside: BTreeSet<_> = span.iter().copied().collect();
        for &u in &inside {
            let (uf, ul) = (tour.first[u as usize], tour.last[u as usize]);
            if uf < f || ul > l {
                return Err(format!("{u} appears in {v}'s interval but is not nested"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let t = euler_tour(1, &[]);
        assert_eq!(t.order, vec![0]);
        assert_eq!((t.first[0], t.last[0]), (0, 0));
    }

    #[test]
    fn reference_tree() {
        // Vertices 1..=9 shifted down by one.
        let e: Vec<_> = [(1, 2), (2, 5), (2, 3), (2, 4), (1, 6), (6, 7), (6, 8), (8, 9)]
            .iter()
            .map(|&(u, v)| (u - 1, v - 1))
            .collect();
        let t = euler_tour(9, &e);
        validate_tour(9, &e, &t).unwrap();
        assert_eq!(t.order.len(), 17);
        assert_eq!((t.order[0], t.order[16]), (0, 0));
        // Subtree sizes read off the intervals: (last - first) / 2 + 1.
        let sizes: Vec<_> = (0..9).map(|v| (t.last[v] - t.first[v]) / 2 + 1).collect();
        assert_eq!(sizes, vec![9, 4, 1, 1, 1, 4, 1, 2, 1]);
    }

    #[test]
    fn list_rank_chain() {
        let succ = vec![2, NIL, 3, 1];
        assert_eq!(list_rank(&succ), vec![3, 0, 2, 1]);
    }
}
