use std::collections::BTreeSet;

use crate::multigraph::NodeId;

/// Index of a tree node inside a [`Dendrogram`] arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeIndex(pub usize);

/// Nested cluster description used to build dendrograms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cluster {
    Leaf(NodeId),
    Group(Vec<Cluster>),
}

impl Cluster {
    pub fn min_node(&self) -> NodeId {
        match self {
            Cluster::Leaf(v) => *v,
            Cluster::Group(children) => children.iter().map(Cluster::min_node).min().unwrap(),
        }
    }

    /// Orders children by smallest contained node, recursively.
    pub fn normalized(self) -> Cluster {
        match self {
            Cluster::Leaf(v) => Cluster::Leaf(v),
            Cluster::Group(children) => {
                let mut children: Vec<Cluster> =
                    children.into_iter().map(Cluster::normalized).collect();
                children.sort_by_key(Cluster::min_node);
                Cluster::Group(children)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Leaf(NodeId),
    Internal(Vec<TreeIndex>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct TreeNode {
    kind: Kind,
    parent: Option<TreeIndex>,
    leaf_count: usize,
    alive: bool,
}

/// Rooted tree whose leaves are graph nodes. Internal nodes have at least two
/// children and cache their leaf count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dendrogram {
    nodes: Vec<TreeNode>,
    root: TreeIndex,
    exhausted: bool,
}

impl Dendrogram {
    pub fn from_cluster(cluster: &Cluster) -> Dendrogram {
        let mut d = Dendrogram {
            nodes: Vec::new(),
            root: TreeIndex(0),
            exhausted: false,
        };
        d.root = d.push(cluster, None);
        d
    }

    fn push(&mut self, cluster: &Cluster, parent: Option<TreeIndex>) -> TreeIndex {
        let index = TreeIndex(self.nodes.len());
        match cluster {
            Cluster::Leaf(v) => self.nodes.push(TreeNode {
                kind: Kind::Leaf(*v),
                parent,
                leaf_count: 1,
                alive: true,
            }),
            Cluster::Group(children) => {
                assert!(
                    children.len() >= 2,
                    "internal dendrogram nodes need two children"
                );
                self.nodes.push(TreeNode {
                    kind: Kind::Internal(Vec::new()),
                    parent,
                    leaf_count: 0,
                    alive: true,
                });
                let kids: Vec<TreeIndex> =
                    children.iter().map(|c| self.push(c, Some(index))).collect();
                self.nodes[index.0].leaf_count =
                    kids.iter().map(|k| self.nodes[k.0].leaf_count).sum();
                self.nodes[index.0].kind = Kind::Internal(kids);
            }
        }
        index
    }

    pub fn root(&self) -> TreeIndex {
        self.root
    }

    /// True once the root itself has been replaced by a leaf.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn is_leaf(&self, i: TreeIndex) -> bool {
        matches!(self.nodes[i.0].kind, Kind::Leaf(_))
    }

    pub fn leaf_node(&self, i: TreeIndex) -> Option<NodeId> {
        match self.nodes[i.0].kind {
            Kind::Leaf(v) => Some(v),
            Kind::Internal(_) => None,
        }
    }

    pub fn children(&self, i: TreeIndex) -> &[TreeIndex] {
        match &self.nodes[i.0].kind {
            Kind::Leaf(_) => &[],
            Kind::Internal(c) => c,
        }
    }

    pub fn parent(&self, i: TreeIndex) -> Option<TreeIndex> {
        self.nodes[i.0].parent
    }

    pub fn leaf_count(&self, i: TreeIndex) -> usize {
        self.nodes[i.0].leaf_count
    }

    /// Distance from the root; the root has depth zero.
    pub fn depth(&self, i: TreeIndex) -> usize {
        let mut depth = 0;
        let mut cur = i;
        while let Some(p) = self.parent(cur) {
            depth += 1;
            cur = p;
        }
        depth
    }

    pub fn is_ancestor(&self, ancestor: TreeIndex, mut i: TreeIndex) -> bool {
        while let Some(p) = self.parent(i) {
            if p == ancestor {
                return true;
            }
            i = p;
        }
        false
    }

    /// Live internal nodes in preorder.
    pub fn internal_nodes(&self) -> Vec<TreeIndex> {
        let mut out = Vec::new();
        if self.exhausted {
            return out;
        }
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            if let Kind::Internal(children) = &self.nodes[i.0].kind {
                out.push(i);
                stack.extend(children.iter().rev());
            }
        }
        out
    }

    pub fn leaves(&self, i: TreeIndex) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            match &self.nodes[j.0].kind {
                Kind::Leaf(v) => out.push(*v),
                Kind::Internal(children) => stack.extend(children.iter().rev()),
            }
        }
        out
    }

    pub fn leaf_set(&self, i: TreeIndex) -> BTreeSet<NodeId> {
        self.leaves(i).into_iter().collect()
    }

    /// Turns the subtree at `i` into a single leaf for `node` and refreshes
    /// leaf counts up to the root.
    pub fn replace_with_leaf(&mut self, i: TreeIndex, node: NodeId) {
        let mut stack: Vec<TreeIndex> = self.children(i).to_vec();
        while let Some(j) = stack.pop() {
            self.nodes[j.0].alive = false;
            stack.extend(self.children(j).iter().copied());
        }
        let removed = self.nodes[i.0].leaf_count - 1;
        self.nodes[i.0].kind = Kind::Leaf(node);
        self.nodes[i.0].leaf_count = 1;
        let mut cur = i;
        while let Some(p) = self.parent(cur) {
            self.nodes[p.0].leaf_count -= removed;
            cur = p;
        }
        if i == self.root {
            self.exhausted = true;
        }
    }

    /// Nested view of the live tree.
    pub fn to_cluster(&self) -> Cluster {
        self.cluster_at(self.root)
    }

    fn cluster_at(&self, i: TreeIndex) -> Cluster {
        match &self.nodes[i.0].kind {
            Kind::Leaf(v) => Cluster::Leaf(*v),
            Kind::Internal(children) => {
                Cluster::Group(children.iter().map(|c| self.cluster_at(*c)).collect())
            }
        }
    }

    /// Checks the arena invariants: live children point back to their parent,
    /// internal nodes have two or more children and cached counts are exact.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i.0];
            if !node.alive {
                return Err(format!("dead node {:?} reachable", i));
            }
            match &node.kind {
                Kind::Leaf(_) => {
                    if node.leaf_count != 1 {
                        return Err(format!("leaf {:?} has count {}", i, node.leaf_count));
                    }
                }
                Kind::Internal(children) => {
                    if children.len() < 2 {
                        return Err(format!("internal {:?} has {} children", i, children.len()));
                    }
                    let sum: usize = children.iter().map(|c| self.nodes[c.0].leaf_count).sum();
                    if sum != node.leaf_count {
                        return Err(format!(
                            "internal {:?} caches {} but children sum {}",
                            i, node.leaf_count, sum
                        ));
                    }
                    for c in children {
                        if self.nodes[c.0].parent != Some(i) {
                            return Err(format!("child {:?} of {:?} has wrong parent", c, i));
                        }
                    }
                    stack.extend(children.iter().copied());
                }
            }
        }
        Ok(())
    }
}
