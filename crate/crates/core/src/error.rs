use thiserror::Error;

use crate::graph::VertexId;

/// Errors raised by graph construction, I/O and the parallel engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) has an endpoint outside [0, {2})")]
    EdgeOutOfRange(u64, u64, usize),

    #[error("vertex {0} out of range for a graph with {1} vertices")]
    VertexOutOfRange(VertexId, usize),

    #[error("graph with {0} vertices does not fit 32-bit vertex ids")]
    TooManyVertices(u64),

    #[error("invalid CSR layout: {0}")]
    InvalidCsr(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("binary graph: {0}")]
    Binary(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot place {requested} distinct edges among {available} vertex pairs")]
    TooManyEdges { requested: u64, available: u64 },

    #[error("hash bag capacity {capacity} exhausted; upper bound was violated")]
    BagFull { capacity: usize },

    #[error("reachability pair table full ({count} pairs, capacity {capacity}); resize and retry")]
    TableOverflow { count: usize, capacity: usize },

    #[error("operation requires an undirected (symmetric) graph")]
    NotSymmetric,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
