//! Parallel graph connectivity: strongly connected components, connected
//! components, biconnected components and least-element lists, plus
//! sequential reference implementations.

pub mod bcc;
pub mod cc;
pub mod error;
pub mod euler;
pub mod gen;
pub mod graph;
pub mod hash;
pub mod hashbag;
pub mod io;
pub mod lelists;
pub mod oracles;
pub mod pairs;
pub mod reach;
pub mod scc;
pub mod sparse_table;
pub mod unionfind;

pub use error::{Error, Result};
pub use graph::{Csr, EdgeView, Graph, VertexId, NO_VERTEX};
