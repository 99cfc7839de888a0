//! Isoperimetric and embedding constants of graphs carrying a probability
//! distribution on their vertices.
//!
//! * [`lambda`]: the max-neighbor Poincaré constant lambda-infinity.
//! * [`spread`]: the spread constant (maximum variance of a 1-Lipschitz
//!   valuation).
//! * [`mve`]: maximum variance embeddings in `R^k`, Gram-matrix lifts and
//!   their rounding.
//! * [`vexp`]: vertex expansion.
//! * [`reductions`]: Partition gadgets and gap checks.

pub mod embedding;
pub mod error;
pub mod gen;
pub mod graph;
pub mod lambda;
pub mod mve;
pub mod objective;
pub mod reductions;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod spread;
pub mod subset;
pub mod vexp;

pub use embedding::{Embedding1D, EmbeddingJson, EmbeddingKD};
pub use error::{Error, Result};
pub use graph::{parse_graph, GraphOptions, StarGraph, TreeGraph, WeightedGraph};
pub use report::{SolveReport, Status, Witness};
pub use scalar::{Rational, Scalar};
