//! Hierarchical clustering of a graph into a [`Dendrogram`].
//!
//! All strategies are top-down: a node set is split into parts, each part is
//! recursed into, and children are ordered by their smallest node id.

mod dendrogram;
pub mod louvain;
pub mod spectral;

pub use dendrogram::{Cluster, Dendrogram, TreeIndex};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::multigraph::{Multigraph, NodeId};
use crate::rng::{substream, Rng, Stream};
use spectral::FiedlerConfig;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClusteringError {
    #[error("cannot cluster an empty graph")]
    EmptyGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClusteringStrategy {
    LouvainRecursive,
    RandomBipartition,
    FiedlerBipartition,
}

impl ClusteringStrategy {
    pub const ALL: [ClusteringStrategy; 3] = [
        ClusteringStrategy::LouvainRecursive,
        ClusteringStrategy::RandomBipartition,
        ClusteringStrategy::FiedlerBipartition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClusteringStrategy::LouvainRecursive => "louvain",
            ClusteringStrategy::RandomBipartition => "random",
            ClusteringStrategy::FiedlerBipartition => "fiedler",
        }
    }
}

impl fmt::Display for ClusteringStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClusteringStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown clustering strategy {s:?}"))
    }
}

/// Dendrogram over all nodes of `g`. Disconnected graphs get one subtree per
/// component under a synthetic root.
pub fn build_dendrogram(
    g: &Multigraph,
    strategy: ClusteringStrategy,
    seed: u64,
) -> Result<Dendrogram, ClusteringError> {
    if g.is_empty() {
        return Err(ClusteringError::EmptyGraph);
    }
    let mut rng = substream(seed, Stream::Clustering);
    let components = g.components();
    let cluster = if components.len() == 1 {
        cluster_set(g, &components[0], strategy, &mut rng)
    } else {
        Cluster::Group(
            components
                .iter()
                .map(|c| cluster_set(g, c, strategy, &mut rng))
                .collect(),
        )
    };
    Ok(Dendrogram::from_cluster(&cluster.normalized()))
}

pub fn louvain_recursive(g: &Multigraph, seed: u64) -> Result<Dendrogram, ClusteringError> {
    build_dendrogram(g, ClusteringStrategy::LouvainRecursive, seed)
}

pub fn random_bipartition(g: &Multigraph, seed: u64) -> Result<Dendrogram, ClusteringError> {
    build_dendrogram(g, ClusteringStrategy::RandomBipartition, seed)
}

pub fn fiedler_bipartition(g: &Multigraph, seed: u64) -> Result<Dendrogram, ClusteringError> {
    build_dendrogram(g, ClusteringStrategy::FiedlerBipartition, seed)
}

fn cluster_set(
    g: &Multigraph,
    set: &BTreeSet<NodeId>,
    strategy: ClusteringStrategy,
    rng: &mut Rng,
) -> Cluster {
    if set.len() == 1 {
        return Cluster::Leaf(*set.iter().next().unwrap());
    }
    if set.len() == 2 {
        return Cluster::Group(set.iter().map(|v| Cluster::Leaf(*v)).collect());
    }
    let parts = match strategy {
        ClusteringStrategy::RandomBipartition => random_halves(set, rng),
        ClusteringStrategy::FiedlerBipartition => {
            let components = g.components_within(set);
            if components.len() > 1 {
                components
            } else {
                spectral::fiedler_split::<f64>(g, set, &FiedlerConfig::default(), rng)
                    .unwrap_or_else(|| random_halves(set, rng))
            }
        }
        ClusteringStrategy::LouvainRecursive => {
            let communities = louvain::communities(g, set, rng);
            if communities.len() > 1 {
                communities
            } else {
                random_halves(set, rng)
            }
        }
    };
    Cluster::Group(
        parts
            .iter()
            .map(|p| cluster_set(g, p, strategy, rng))
            .collect(),
    )
}

/// Uniformly random split into halves whose sizes differ by at most one; the
/// first half gets the extra node.
pub fn random_halves(set: &BTreeSet<NodeId>, rng: &mut Rng) -> Vec<BTreeSet<NodeId>> {
    let mut nodes: Vec<NodeId> = set.iter().copied().collect();
    nodes.shuffle(rng);
    let cut = nodes.len().div_ceil(2);
    let right = nodes.split_off(cut);
    vec![nodes.into_iter().collect(), right.into_iter().collect()]
}
