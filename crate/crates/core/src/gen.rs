//! Seeded synthetic graph generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` consumed in a
//! fixed sequential order, so a spec maps to the same graph on every platform
//! and thread count.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, MAX_VERTICES};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeScheme {
    /// Every adjacent pair gets exactly one edge, oriented at random.
    Oriented,
    /// Each adjacent pair gets a forward edge, a backward edge, or nothing.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    pub wrap: bool,
    pub scheme: LatticeScheme,
    pub p_forward: f64,
    pub p_backward: f64,
    pub seed: u64,
}

impl LatticeSpec {
    /// Torus with each link oriented either way with probability 1/2.
    pub fn oriented(rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            rows,
            cols,
            wrap: true,
            scheme: LatticeScheme::Oriented,
            p_forward: 0.5,
            p_backward: 0.5,
            seed,
        }
    }

    /// Torus with each link forward w.p. 0.3, backward w.p. 0.3, absent otherwise.
    pub fn sampled(rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            rows,
            cols,
            wrap: true,
            scheme: LatticeScheme::Sampled,
            p_forward: 0.3,
            p_backward: 0.3,
            seed,
        }
    }

    /// Full-size presets: `SQR`/`SQR'` are 10^4 x 10^4, `REC`/`REC'` are
    /// 10^3 x 10^4; the primed variants use the sampled scheme.
    pub fn preset(name: &str, seed: u64) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "SQR" => Self::oriented(10_000, 10_000, seed),
            "REC" => Self::oriented(1_000, 10_000, seed),
            "SQR'" => Self::sampled(10_000, 10_000, seed),
            "REC'" => Self::sampled(1_000, 10_000, seed),
            _ => return None,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(self.p_forward) || !ok(self.p_backward) {
            return Err(Error::InvalidParameter(format!(
                "lattice probabilities must lie in [0, 1], got {} and {}",
                self.p_forward, self.p_backward
            )));
        }
        let sum = self.p_forward + self.p_backward;
        match self.scheme {
            LatticeScheme::Oriented if (sum - 1.0).abs() > 1e-9 => {
                return Err(Error::InvalidParameter(format!(
                    "oriented lattice needs p_forward + p_backward = 1, got {sum}"
                )))
            }
            LatticeScheme::Sampled if sum > 1.0 + 1e-9 => {
                return Err(Error::InvalidParameter(format!(
                    "sampled lattice needs p_forward + p_backward <= 1, got {sum}"
                )))
            }
            _ => {}
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidParameter("lattice needs at least one row and column".into()));
        }
        if self.num_vertices() > MAX_VERTICES {
            return Err(Error::TooManyVertices(self.num_vertices() as u64));
        }
        Ok(())
    }

    /// Adjacent pairs `(u, v)` in enumeration order: for each vertex its
    /// right link, then its down link. Self-pairs are skipped; with two rows
    /// (or columns) and wraparound the same pair appears twice.
    pub fn links(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let (r, c, wrap) = (self.rows, self.cols, self.wrap);
        (0..r).flat_map(move |i| {
            (0..c).flat_map(move |j| {
                let u = (i * c + j) as VertexId;
                let right = if j + 1 < c {
                    Some(i * c + j + 1)
                } else if wrap {
                    Some(i * c)
                } else {
                    None
                };
                let down = if i + 1 < r {
                    Some((i + 1) * c + j)
                } else if wrap {
                    Some(j)
                } else {
                    None
                };
                [right, down]
                    .into_iter()
                    .flatten()
                    .map(move |v| (u, v as VertexId))
                    .filter(|&(u, v)| u != v)
            })
        })
    }
}

pub fn gen_lattice(spec: &LatticeSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng(spec.seed);
    let mut edges = Vec::with_capacity(2 * spec.num_vertices());
    for (u, v) in spec.links() {
        match spec.scheme {
            LatticeScheme::Oriented => {
                if rng.gen_bool(spec.p_forward) {
                    edges.push((u, v));
                } else {
                    edges.push((v, u));
                }
            }
            LatticeScheme::Sampled => {
                let x: f64 = rng.gen();
                if x < spec.p_forward {
                    edges.push((u, v));
                } else if x < spec.p_forward + spec.p_backward {
                    edges.push((v, u));
                }
            }
        }
    }
    Graph::from_edges(spec.num_vertices(), &edges)
}

/// `m` distinct non-loop directed edges drawn uniformly without replacement.
pub fn gen_random_digraph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n as u64));
    }
    let space = n.saturating_mul(n.saturating_sub(1));
    if m > space {
        return Err(Error::TooManyEdges {
            requested: m as u64,
            available: space as u64,
        });
    }
    let mut rng = rng(seed);
    let mut edges: Vec<(VertexId, VertexId)> = index::sample(&mut rng, space, m)
        .into_iter()
        .map(|i| {
            let u = i / (n - 1);
            let r = i % (n - 1);
            let v = if r < u { r } else { r + 1 };
            (u as VertexId, v as VertexId)
        })
        .collect();
    edges.sort_unstable();
    Graph::from_edges(n, &edges)
}

/// Random undirected graph: `m` distinct directed draws, then symmetrized.
pub fn gen_random_undirected(n: usize, m: usize, seed: u64) -> Result<Graph> {
    Ok(gen_random_digraph(n, m, seed)?.symmetrize())
}

/// Connected undirected graph: a random recursive tree plus `extra` random
/// edges (fewer if some coincide with tree edges).
pub fn gen_random_connected(n: usize, extra: usize, seed: u64) -> Result<Graph> {
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n as u64));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(n + extra);
    for v in 1..n {
        edges.push((rng.gen_range(0..v) as VertexId, v as VertexId));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n) as VertexId;
            let v = rng.gen_range(0..n) as VertexId;
            edges.push((u, v));
        }
    }
    Graph::undirected_from_edges(n, &edges)
}

/// Uniform random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<VertexId> {
    let mut p: Vec<VertexId> = (0..n as VertexId).collect();
    p.shuffle(&mut rng(seed));
    p
}
