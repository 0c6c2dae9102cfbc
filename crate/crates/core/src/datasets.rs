//! Bundled and optional benchmark graphs.

use std::path::PathBuf;

use crate::multigraph::edgelist::{self, EdgeList, EdgeListError};

const KARATE: &str = include_str!("../data/karate.txt");

/// Environment variable naming a Dolphins edge list.
pub const DOLPHINS_ENV: &str = "CNRG_DOLPHINS";

/// Zachary's karate club: 34 nodes, 78 edges.
pub fn karate() -> EdgeList {
    edgelist::parse_str(KARATE).expect("bundled karate edge list parses")
}

/// The Dolphins social network, if an edge list is available at
/// `$CNRG_DOLPHINS` or `data/dolphins.txt` in this crate.
pub fn dolphins() -> Option<Result<EdgeList, EdgeListError>> {
    let path = std::env::var_os(DOLPHINS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/dolphins.txt"))
        });
    path.exists().then(|| edgelist::read_path(path))
}
