//! Labeled undirected multigraphs with terminal and nonterminal nodes.
//!
//! Node handles are small integers that stay stable for the lifetime of a
//! graph. Adjacency is stored symmetrically in ordered maps so iteration order
//! (and everything built on top of it) is deterministic.

mod canonical;
pub mod edgelist;

pub use canonical::{canonical_form, CanonicalForm, CanonicalKey, DEFAULT_CANONICAL_CAP};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque node handle, unique within one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A node is either a terminal or a nonterminal carrying its size ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeLabel {
    Terminal,
    Nonterminal(u32),
}

impl NodeLabel {
    pub fn is_terminal(&self) -> bool {
        matches!(self, NodeLabel::Terminal)
    }

    pub fn nonterminal_size(&self) -> Option<u32> {
        match self {
            NodeLabel::Terminal => None,
            NodeLabel::Nonterminal(w) => Some(*w),
        }
    }
}

/// Per-node boundary degree of a node subset.
pub type BoundarySpec = BTreeMap<NodeId, u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("edge multiplicity must be positive")]
    ZeroMultiplicity,
    #[error("node subset must not be empty")]
    EmptySubset,
    #[error("contraction label has size {label} but the subset has {actual} boundary edges")]
    ContractMismatch { label: u32, actual: u32 },
    #[error("contraction label must be a nonterminal")]
    TerminalContraction,
    #[error("canonical form supports at most {cap} nodes, got {nodes}")]
    UnsupportedSize { nodes: usize, cap: usize },
}

/// Undirected multigraph `⟨V, E, κ, L⟩`.
///
/// `κ(u, v)` is stored under both `(u, v)` and `(v, u)`. Absent pairs have
/// multiplicity zero. Self-loops are never stored. Equality compares nodes,
/// labels and multiplicities only.
#[derive(Clone, Debug, Default)]
pub struct Multigraph {
    labels: BTreeMap<NodeId, NodeLabel>,
    adjacency: BTreeMap<NodeId, BTreeMap<NodeId, u32>>,
    next_id: u32,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adjacency == other.adjacency
    }
}

impl Eq for Multigraph {}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph of `n` terminal nodes with ids `0..n` and no edges.
    pub fn with_terminals(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_node(NodeLabel::Terminal);
        }
        g
    }

    /// Builds a terminal-only graph from unit edges, creating nodes on demand.
    pub fn from_edges<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut g = Self::new();
        for (u, v) in edges {
            for id in [u, v] {
                if !g.contains(NodeId(id)) {
                    g.insert_node(NodeId(id), NodeLabel::Terminal)?;
                }
            }
            g.add_edge(NodeId(u), NodeId(v), 1)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, label: NodeLabel) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.labels.insert(id, label);
        self.adjacency.insert(id, BTreeMap::new());
        id
    }

    /// Inserts a node under a caller-chosen id.
    pub fn insert_node(&mut self, id: NodeId, label: NodeLabel) -> Result<(), GraphError> {
        if self.labels.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        self.labels.insert(id, label);
        self.adjacency.insert(id, BTreeMap::new());
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    /// Removes a node and every edge touching it, returning its former
    /// neighbours with multiplicities.
    pub fn remove_node(&mut self, id: NodeId) -> Result<BTreeMap<NodeId, u32>, GraphError> {
        self.labels.remove(&id).ok_or(GraphError::UnknownNode(id))?;
        let nbrs = self.adjacency.remove(&id).unwrap_or_default();
        for w in nbrs.keys() {
            if let Some(row) = self.adjacency.get_mut(w) {
                row.remove(&id);
            }
        }
        Ok(nbrs)
    }

    pub fn set_label(&mut self, id: NodeId, label: NodeLabel) -> Result<(), GraphError> {
        let slot = self
            .labels
            .get_mut(&id)
            .ok_or(GraphError::UnknownNode(id))?;
        *slot = label;
        Ok(())
    }

    /// Increases `κ(u, v)` by `mult`.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, mult: u32) -> Result<(), GraphError> {
        if mult == 0 {
            return Err(GraphError::ZeroMultiplicity);
        }
        for id in [u, v] {
            if !self.contains(id) {
                return Err(GraphError::UnknownNode(id));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        *self.adjacency.get_mut(&u).unwrap().entry(v).or_insert(0) += mult;
        *self.adjacency.get_mut(&v).unwrap().entry(u).or_insert(0) += mult;
        Ok(())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.labels.contains_key(&id)
    }

    pub fn label(&self, id: NodeId) -> Option<NodeLabel> {
        self.labels.get(&id).copied()
    }

    pub fn multiplicity(&self, u: NodeId, v: NodeId) -> u32 {
        self.adjacency
            .get(&u)
            .and_then(|row| row.get(&v))
            .copied()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct adjacent pairs, ignoring multiplicity.
    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Sum of multiplicities over all distinct pairs.
    pub fn total_multiplicity(&self) -> u64 {
        self.edges().map(|(_, _, m)| m as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.labels.keys().copied()
    }

    pub fn labeled_nodes(&self) -> impl Iterator<Item = (NodeId, NodeLabel)> + '_ {
        self.labels.iter().map(|(k, v)| (*k, *v))
    }

    /// Each distinct pair once, as `(u, v, κ)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u32)> + '_ {
        self.adjacency.iter().flat_map(|(&u, row)| {
            row.iter()
                .filter(move |(&v, _)| u < v)
                .map(move |(&v, &m)| (u, v, m))
        })
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.adjacency
            .get(&id)
            .into_iter()
            .flat_map(|row| row.iter().map(|(k, v)| (*k, *v)))
    }

    /// Degree counting multiplicity.
    pub fn degree(&self, id: NodeId) -> u32 {
        self.neighbors(id).map(|(_, m)| m).sum()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.labels.values().filter(|l| !l.is_terminal()).count()
    }

    /// Distinct nonterminal sizes present in the graph.
    pub fn nonterminal_sizes(&self) -> BTreeSet<u32> {
        self.labels
            .values()
            .filter_map(NodeLabel::nonterminal_size)
            .collect()
    }

    /// `|L|`: terminal node, internal edge, and one symbol per distinct
    /// nonterminal size. Never below 2.
    pub fn label_alphabet_size(&self) -> usize {
        2 + self.nonterminal_sizes().len()
    }

    fn check_subset(&self, subset: &BTreeSet<NodeId>) -> Result<(), GraphError> {
        match subset.iter().find(|id| !self.contains(**id)) {
            Some(id) => Err(GraphError::UnknownNode(*id)),
            None => Ok(()),
        }
    }

    /// Boundary edges of `subset`: total count ω and each member's share.
    pub fn boundary(&self, subset: &BTreeSet<NodeId>) -> Result<(u32, BoundarySpec), GraphError> {
        if subset.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        self.check_subset(subset)?;
        let mut spec = BoundarySpec::new();
        let mut omega = 0;
        for &v in subset {
            let outside: u32 = self
                .neighbors(v)
                .filter(|(w, _)| !subset.contains(w))
                .map(|(_, m)| m)
                .sum();
            spec.insert(v, outside);
            omega += outside;
        }
        Ok((omega, spec))
    }

    /// Subgraph on `subset` keeping node ids, labels and internal
    /// multiplicities.
    pub fn induced_subgraph(&self, subset: &BTreeSet<NodeId>) -> Result<Multigraph, GraphError> {
        self.check_subset(subset)?;
        let mut sub = Multigraph::new();
        for &v in subset {
            sub.insert_node(v, self.labels[&v])?;
        }
        for &v in subset {
            for (w, m) in self.neighbors(v) {
                if v < w && subset.contains(&w) {
                    sub.add_edge(v, w, m)?;
                }
            }
        }
        sub.next_id = self.next_id;
        Ok(sub)
    }

    /// Replaces `subset` by one fresh node carrying `label`, redirecting every
    /// boundary edge to it. Returns the contracted copy and the new node id.
    pub fn contract(
        &self,
        subset: &BTreeSet<NodeId>,
        label: NodeLabel,
    ) -> Result<(Multigraph, NodeId), GraphError> {
        let mut g = self.clone();
        let id = g.contract_in_place(subset, label)?;
        Ok((g, id))
    }

    pub fn contract_in_place(
        &mut self,
        subset: &BTreeSet<NodeId>,
        label: NodeLabel,
    ) -> Result<NodeId, GraphError> {
        let Some(size) = label.nonterminal_size() else {
            return Err(GraphError::TerminalContraction);
        };
        let (omega, _) = self.boundary(subset)?;
        if size != omega {
            return Err(GraphError::ContractMismatch {
                label: size,
                actual: omega,
            });
        }
        let mut redirected: BTreeMap<NodeId, u32> = BTreeMap::new();
        for &v in subset {
            for (w, m) in self.remove_node(v)? {
                if !subset.contains(&w) {
                    *redirected.entry(w).or_insert(0) += m;
                }
            }
        }
        let x = self.add_node(label);
        for (w, m) in redirected {
            debug_assert_ne!(w, x, "contraction never creates self-loops");
            self.add_edge(x, w, m)?;
        }
        Ok(x)
    }

    /// Copy with every multiplicity reduced to one.
    pub fn collapsed(&self) -> Multigraph {
        let mut g = self.clone();
        for row in g.adjacency.values_mut() {
            for m in row.values_mut() {
                *m = 1;
            }
        }
        g
    }

    /// Copy with ids renumbered `0..n` in ascending order of the old ids.
    pub fn compacted(&self) -> Multigraph {
        let index: BTreeMap<NodeId, NodeId> = self
            .nodes()
            .enumerate()
            .map(|(i, v)| (v, NodeId(i as u32)))
            .collect();
        let mut g = Multigraph::new();
        for (v, l) in self.labeled_nodes() {
            g.insert_node(index[&v], l).unwrap();
        }
        for (u, v, m) in self.edges() {
            g.add_edge(index[&u], index[&v], m).unwrap();
        }
        g
    }

    /// Connected components, each as a sorted node set, ordered by smallest id.
    pub fn components(&self) -> Vec<BTreeSet<NodeId>> {
        self.components_within(&self.labels.keys().copied().collect())
    }

    /// Connected components of the subgraph induced by `subset`.
    pub fn components_within(&self, subset: &BTreeSet<NodeId>) -> Vec<BTreeSet<NodeId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in subset {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (w, _) in self.neighbors(v) {
                    if subset.contains(&w) && seen.insert(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}
