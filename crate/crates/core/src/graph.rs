//! Immutable compressed-sparse-row graphs.
//!
//! Neighbor lists are sorted ascending, deduplicated and free of self-loops.
//! Directed graphs always carry their transpose so that every algorithm can
//! walk in-edges; symmetric graphs serve as their own transpose.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense 0-based vertex identifier.
pub type VertexId = u32;

/// Sentinel for "no vertex". Never a valid id.
pub const NO_VERTEX: VertexId = VertexId::MAX;

/// Largest vertex count representable with [`VertexId`].
pub const MAX_VERTICES: usize = NO_VERTEX as usize;

/// One direction of adjacency in CSR layout.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<u64>,
    targets: Vec<VertexId>,
}

impl Csr {
    /// Builds a CSR from raw arrays, validating every invariant.
    pub fn new(offsets: Vec<u64>, targets: Vec<VertexId>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidCsr("offsets must have n+1 entries".into()));
        }
        let n = offsets.len() - 1;
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n as u64));
        }
        if offsets[0] != 0 {
            return Err(Error::InvalidCsr("offsets[0] must be 0".into()));
        }
        if offsets[n] != targets.len() as u64 {
            return Err(Error::InvalidCsr(format!(
                "offsets[n] = {} but there are {} targets",
                offsets[n],
                targets.len()
            )));
        }
        if let Some(i) = offsets.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidCsr(format!("offsets decrease at vertex {i}")));
        }
        if let Some(&t) = targets.iter().find(|&&t| t as usize >= n) {
            return Err(Error::InvalidCsr(format!("target {t} out of range [0, {n})")));
        }
        Ok(Self { offsets, targets })
    }

    fn from_sorted_pairs(n: usize, pairs: &[(VertexId, VertexId)]) -> Self {
        let mut offsets = vec![0u64; n + 1];
        for &(u, _) in pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.par_iter().map(|&(_, v)| v).collect();
        Self { offsets, targets }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    fn transposed(&self) -> Self {
        let n = self.num_vertices();
        let mut pairs: Vec<(VertexId, VertexId)> = (0..n as VertexId)
            .into_par_iter()
            .flat_map_iter(|u| self.neighbors(u).iter().map(move |&v| (v, u)))
            .collect();
        pairs.par_sort_unstable();
        Self::from_sorted_pairs(n, &pairs)
    }

    fn is_canonical(&self) -> bool {
        (0..self.num_vertices() as VertexId).into_par_iter().all(|v| {
            let nb = self.neighbors(v);
            nb.windows(2).all(|w| w[0] < w[1]) && nb.binary_search(&v).is_err()
        })
    }
}

/// A read-only view pairing out-edges with the matching in-edges.
///
/// Reachability searches run over a view so the same code walks a graph
/// forward, backward (over the transpose) or undirected.
#[derive(Clone, Copy, Debug)]
pub struct EdgeView<'a> {
    pub out: &'a Csr,
    pub inn: &'a Csr,
}

impl<'a> EdgeView<'a> {
    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.out.num_vertices()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.out.num_edges()
    }
}

/// Immutable graph with optional transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    csr: Csr,
    transpose: Option<Csr>,
}

impl Graph {
    /// Builds a directed graph from an edge list.
    ///
    /// Duplicate edges and self-loops are dropped; the transpose is built
    /// alongside.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n as u64));
        }
        if let Some(&(u, v)) = edges
            .iter()
            .find(|&&(u, v)| u as usize >= n || v as usize >= n)
        {
            return Err(Error::EdgeOutOfRange(u as u64, v as u64, n));
        }
        let mut pairs: Vec<(VertexId, VertexId)> =
            edges.par_iter().copied().filter(|&(u, v)| u != v).collect();
        pairs.par_sort_unstable();
        pairs.dedup();
        let csr = Csr::from_sorted_pairs(n, &pairs);
        let transpose = Some(csr.transposed());
        Ok(Self { csr, transpose })
    }

    /// Builds an undirected graph: every edge is stored in both directions.
    pub fn undirected_from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        Ok(Self::from_edges(n, edges)?.symmetrize())
    }

    /// Wraps an existing CSR. Neighbor lists must already be sorted,
    /// deduplicated and loop-free.
    pub fn from_csr(csr: Csr, symmetric: bool) -> Result<Self> {
        if !csr.is_canonical() {
            return Err(Error::InvalidCsr(
                "neighbor lists must be strictly increasing and loop-free".into(),
            ));
        }
        if symmetric {
            let t = csr.transposed();
            if t != csr {
                return Err(Error::NotSymmetric);
            }
            Ok(Self {
                csr,
                transpose: None,
            })
        } else {
            let transpose = Some(csr.transposed());
            Ok(Self { csr, transpose })
        }
    }

    /// Union of the graph with its reverse. The result is its own transpose.
    pub fn symmetrize(&self) -> Self {
        if self.is_symmetric() {
            return self.clone();
        }
        let n = self.num_vertices();
        let mut pairs: Vec<(VertexId, VertexId)> = (0..n as VertexId)
            .into_par_iter()
            .flat_map_iter(|u| {
                self.csr
                    .neighbors(u)
                    .iter()
                    .flat_map(move |&v| [(u, v), (v, u)])
            })
            .collect();
        pairs.par_sort_unstable();
        pairs.dedup();
        Self {
            csr: Csr::from_sorted_pairs(n, &pairs),
            transpose: None,
        }
    }

    /// The same edges reversed.
    pub fn reversed(&self) -> Self {
        match &self.transpose {
            None => self.clone(),
            Some(t) => Self {
                csr: t.clone(),
                transpose: Some(self.csr.clone()),
            },
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.csr.num_vertices()
    }

    /// Number of stored directed edges (an undirected edge counts twice).
    #[inline]
    pub fn num_edges(&self) -> usize {
        self.csr.num_edges()
    }

    #[inline]
    pub fn is_symmetric(&self) -> bool {
        self.transpose.is_none()
    }

    pub fn csr(&self) -> &Csr {
        &self.csr
    }

    /// The in-edge CSR: the stored transpose, or the graph itself when symmetric.
    pub fn transpose_csr(&self) -> &Csr {
        self.transpose.as_ref().unwrap_or(&self.csr)
    }

    pub fn forward(&self) -> EdgeView<'_> {
        EdgeView {
            out: &self.csr,
            inn: self.transpose_csr(),
        }
    }

    pub fn backward(&self) -> EdgeView<'_> {
        EdgeView {
            out: self.transpose_csr(),
            inn: &self.csr,
        }
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v, self.num_vertices()))
        }
    }

    pub fn out_degree(&self, v: VertexId) -> Result<usize> {
        self.check(v)?;
        Ok(self.csr.degree(v))
    }

    pub fn in_degree(&self, v: VertexId) -> Result<usize> {
        self.check(v)?;
        Ok(self.transpose_csr().degree(v))
    }

    #[inline]
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.csr.neighbors(v)
    }

    #[inline]
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.transpose_csr().neighbors(v)
    }

    /// All stored directed edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.num_vertices() as VertexId)
            .flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Each undirected edge once, as (u, v) with u < v. Symmetric graphs only.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges().filter(|&(u, v)| u < v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn cycle3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn three_cycle_has_unit_out_degree() {
        let g = cycle3();
        assert_eq!(g.num_edges(), 3);
        for v in 0..3 {
            assert_eq!(g.out_degree(v).unwrap(), 1);
            assert_eq!(g.in_degree(v).unwrap(), 1);
        }
    }

    #[test]
    fn duplicates_and_loops_removed() {
        let g = Graph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        let g = Graph::from_edges(2, &[(0, 0), (1, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_edges(4, &[]).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(g.csr().offsets().iter().all(|&o| o == 0));
        assert_eq!(g.out_degree(0).unwrap(), 0);
    }

    #[test]
    fn out_of_range_endpoint_is_named() {
        let err = Graph::from_edges(3, &[(0, 1), (1, 3)]).unwrap_err();
        assert!(matches!(err, Error::EdgeOutOfRange(1, 3, 3)), "{err}");
        assert!(err.to_string().contains("(1, 3)"));
        assert!(matches!(
            cycle3().out_degree(3),
            Err(Error::VertexOutOfRange(3, 3))
        ));
    }

    #[test]
    fn star_center_degree() {
        let edges: Vec<_> = (1..=5).map(|v| (0, v)).collect();
        let g = Graph::from_edges(6, &edges).unwrap();
        assert_eq!(g.out_degree(0).unwrap(), 5);
        assert_eq!(g.in_degree(0).unwrap(), 0);
    }

    #[test]
    fn symmetrize_small_cases() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap().symmetrize();
        assert!(g.is_symmetric());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);

        let both = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)]).unwrap();
        let s = both.symmetrize();
        assert_eq!(
            s.edges().collect::<Vec<_>>(),
            both.edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn from_csr_validates() {
        assert!(Csr::new(vec![0, 2], vec![0]).is_err());
        assert!(Csr::new(vec![0, 1, 0], vec![1]).is_err());
        assert!(Csr::new(vec![0, 1], vec![5]).is_err());
        let csr = Csr::new(vec![0, 1, 1], vec![1]).unwrap();
        assert!(matches!(
            Graph::from_csr(csr.clone(), true),
            Err(Error::NotSymmetric)
        ));
        let g = Graph::from_csr(csr, false).unwrap();
        assert_eq!(g.in_neighbors(1), &[0]);
    }

    fn edge_list(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
        (1..max_n).prop_flat_map(|n| {
            let e = (0..n as u32, 0..n as u32);
            (Just(n), proptest::collection::vec(e, 0..4 * n))
        })
    }

    proptest! {
        #[test]
        fn build_reproduces_edge_set((n, edges) in edge_list(60)) {
            let g = Graph::from_edges(n, &edges).unwrap();
            let expect: BTreeSet<_> = edges.iter().copied().filter(|(u, v)| u != v).collect();
            let got: BTreeSet<_> = g.edges().collect();
            prop_assert_eq!(got.len(), g.num_edges());
            prop_assert_eq!(got, expect);
        }

        #[test]
        fn transpose_is_an_involution((n, edges) in edge_list(60)) {
            let g = Graph::from_edges(n, &edges).unwrap();
            let rr = g.reversed().reversed();
            prop_assert_eq!(rr.csr(), g.csr());
            let t: BTreeSet<_> = g.reversed().edges().map(|(u, v)| (v, u)).collect();
            let f: BTreeSet<_> = g.edges().collect();
            prop_assert_eq!(t, f);
        }

        #[test]
        fn symmetrize_is_set_union((n, edges) in edge_list(100)) {
            let g = Graph::from_edges(n, &edges).unwrap();
            let s = g.symmetrize();
            let mut expect = BTreeSet::new();
            for &(u, v) in &edges {
                if u != v {
                    expect.insert((u, v));
                    expect.insert((v, u));
                }
            }
            prop_assert_eq!(s.edges().collect::<BTreeSet<_>>(), expect);
            prop_assert_eq!(s.in_neighbors(0), s.out_neighbors(0));
        }
    }
}
