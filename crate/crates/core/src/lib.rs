//! Clustering-based node replacement grammars.
//!
//! A grammar is extracted from a graph by clustering it into a dendrogram
//! and repeatedly contracting small subtrees into nonterminal nodes. The
//! resulting rules can regenerate the graph exactly by replaying the
//! derivation, or stochastically to produce new graphs with similar
//! structure.

pub mod clustering;
pub mod datasets;
pub mod extraction;
pub mod generation;
pub mod grammar;
pub mod mdl;
pub mod metrics;
pub mod multigraph;
pub mod rng;
pub mod scalar;

pub use clustering::{build_dendrogram, ClusteringStrategy, Dendrogram};
pub use extraction::{extract, extract_graph, ExtractionError, ScoringPolicy};
pub use generation::{
    generate, generate_with, replay, GenerationConfig, GenerationError, ReplayError,
};
pub use grammar::{ExtractionParams, Grammar, GrammarError, Rule};
pub use mdl::{BitLength, DlStats, MdlError};
pub use multigraph::{Multigraph, NodeId, NodeLabel};
pub use scalar::Scalar;

/// Description lengths in double precision.
pub type Bits = mdl::BitLength<f64>;
/// Single-precision description lengths.
pub type Bits32 = mdl::BitLength<f32>;
/// Adjacency spectrum in double precision.
pub type Spectrum = metrics::Spectrum<f64>;
