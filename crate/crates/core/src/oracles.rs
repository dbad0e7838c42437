//! Sequential reference algorithms. Written for auditability, not speed;
//! every traversal is iterative so deep graphs cannot overflow the stack.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::graph::{EdgeView, Graph, VertexId, NO_VERTEX};

/// Relabels a per-vertex labeling by order of first appearance, so two
/// labelings induce the same partition iff their canonical forms are equal.
pub fn canonical_partition<T: Eq + Hash + Copy>(labels: &[T]) -> Vec<u32> {
    let mut ids = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len() as u32;
            *ids.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn count_classes<T: Eq + Hash + Copy>(labels: &[T]) -> usize {
    labels.iter().collect::<std::collections::HashSet<_>>().len()
}

/// Tarjan's SCC algorithm. Returns a component index per vertex; indices
/// are assigned in completion order (reverse topological order).
pub fn tarjan_scc(g: &Graph) -> Vec<u32> {
    let n = g.num_vertices();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![u32::MAX; n];
    let mut stack = Vec::new();
    let mut call: Vec<(VertexId, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0u32;

    for root in 0..n as VertexId {
        if index[root as usize] != u32::MAX {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            let nb = g.out_neighbors(v);
            if *next < nb.len() {
                let w = nb[*next];
                *next += 1;
                let wi = w as usize;
                if index[wi] == u32::MAX {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(p, _)) = call.last() {
                low[p as usize] = low[p as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp[w as usize] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}

/// Biconnected structure of an undirected graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BccSummary {
    /// Vertex sets of the biconnected components (each sorted, list sorted).
    /// Isolated vertices belong to no component.
    pub components: Vec<Vec<VertexId>>,
    pub articulation_points: Vec<VertexId>,
    /// Bridges as `(min, max)` pairs, sorted.
    pub bridges: Vec<(VertexId, VertexId)>,
}

impl BccSummary {
    /// Sorts every field into canonical order.
    pub fn normalize(&mut self) {
        for c in &mut self.components {
            c.sort_unstable();
            c.dedup();
        }
        self.components.sort();
        self.articulation_points.sort_unstable();
        self.articulation_points.dedup();
        for b in &mut self.bridges {
            if b.0 > b.1 {
                *b = (b.1, b.0);
            }
        }
        self.bridges.sort_unstable();
        self.bridges.dedup();
    }
}

/// Hopcroft-Tarjan biconnected components with an explicit edge stack.
pub fn hopcroft_tarjan_bcc(g: &Graph) -> BccSummary {
    let n = g.num_vertices();
    let mut disc = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut is_art = vec![false; n];
    let mut out = BccSummary::default();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    // (vertex, parent, next neighbor index)
    let mut call: Vec<(VertexId, VertexId, usize)> = Vec::new();
    let mut counter = 0u32;

    for root in 0..n as VertexId {
        if disc[root as usize] != u32::MAX {
            continue;
        }
        disc[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        call.push((root, NO_VERTEX, 0));
        let mut root_children = 0;

        while let Some(&mut (v, parent, ref mut next)) = call.last_mut() {
            let nb = g.out_neighbors(v);
            if *next < nb.len() {
                let w = nb[*next];
                *next += 1;
                if w == parent {
                    continue;
                }
                let wi = w as usize;
                if disc[wi] == u32::MAX {
                    disc[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    edges.push((v, w));
                    if v == root {
                        root_children += 1;
                    }
                    call.push((w, v, 0));
                } else if disc[wi] < disc[v as usize] {
                    low[v as usize] = low[v as usize].min(disc[wi]);
                    edges.push((v, w));
                }
                continue;
            }
            call.pop();
            if parent == NO_VERTEX {
                continue;
            }
            let (p, c) = (parent as usize, v as usize);
            low[p] = low[p].min(low[c]);
            if low[c] >= disc[p] {
                if parent != root {
                    is_art[p] = true;
                }
                if low[c] > disc[p] {
                    out.bridges.push((parent.min(v), parent.max(v)));
                }
                let mut comp = Vec::new();
                loop {
                    let (a, b) = edges.pop().expect("bcc edge stack underflow");
                    comp.push(a);
                    comp.push(b);
                    if (a, b) == (parent, v) {
                        break;
                    }
                }
                out.components.push(comp);
            }
        }
        if root_children >= 2 {
            is_art[root as usize] = true;
        }
    }
    out.articulation_points = (0..n as VertexId).filter(|&v| is_art[v as usize]).collect();
    out.normalize();
    out
}

/// Cohen's sequential LE-lists: sources in priority order (`order[0]` first),
/// each running a BFS pruned at vertices that already know a source at least
/// as close. Lists come out in decreasing distance, ending with `(v, 0)`.
pub fn cohen_lelists(g: &Graph, order: &[VertexId]) -> Vec<Vec<(VertexId, u32)>> {
    let n = g.num_vertices();
    let mut delta = vec![u32::MAX; n];
    let mut lists = vec![Vec::new(); n];
    let mut dist = vec![u32::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for &s in order {
        dist[s as usize] = 0;
        touched.push(s);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if d >= delta[v as usize] {
                continue;
            }
            delta[v as usize] = d;
            lists[v as usize].push((s, d));
            for &u in g.out_neighbors(v) {
                if dist[u as usize] == u32::MAX && d + 1 < delta[u as usize] {
                    dist[u as usize] = d + 1;
                    touched.push(u);
                    queue.push_back(u);
                }
            }
        }
        for v in touched.drain(..) {
            dist[v as usize] = u32::MAX;
        }
    }
    lists
}

/// Sequential BFS over `view` from `src`.
pub fn seq_bfs_reach(view: EdgeView<'_>, src: VertexId) -> Vec<bool> {
    let mut seen = vec![false; view.num_vertices()];
    let mut queue = VecDeque::from([src]);
    seen[src as usize] = true;
    while let Some(v) = queue.pop_front() {
        for &u in view.out.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

/// Connected components of the undirected view of `g` (edges in either
/// direction connect). Each vertex is labelled by its component's minimum id.
pub fn seq_components(g: &Graph) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut label = vec![NO_VERTEX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as VertexId {
        if label[s as usize] != NO_VERTEX {
            continue;
        }
        label[s as usize] = s;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if label[u as usize] == NO_VERTEX {
                    label[u as usize] = s;
                    queue.push_back(u);
                }
            }
        }
    }
    label
}
