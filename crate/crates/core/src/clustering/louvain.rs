//! Multi-level Louvain modularity optimisation on an induced subgraph.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use crate::multigraph::{Multigraph, NodeId};
use crate::rng::Rng;

const MIN_GAIN: f64 = 1e-12;

/// Weighted graph on `0..n` with self-loop weights, as used between levels.
#[derive(Clone, Debug)]
struct Level {
    adjacency: Vec<BTreeMap<usize, f64>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn strength(&self, i: usize) -> f64 {
        self.adjacency[i].values().sum::<f64>() + 2.0 * self.self_loops[i]
    }

    fn total_weight(&self) -> f64 {
        (0..self.len()).map(|i| self.strength(i)).sum::<f64>() / 2.0
    }

    /// One pass of local moves until stable. Returns the community of each
    /// node (renumbered densely) and whether any node moved.
    fn local_moves(&self, rng: &mut Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let m2 = 2.0 * self.total_weight();
        let mut community: Vec<usize> = (0..n).collect();
        if m2 == 0.0 {
            return (community, false);
        }
        let strength: Vec<f64> = (0..n).map(|i| self.strength(i)).collect();
        let mut totals = strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let own = community[i];
                totals[own] -= strength[i];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                links.insert(own, 0.0);
                for (&j, &w) in &self.adjacency[i] {
                    *links.entry(community[j]).or_insert(0.0) += w;
                }
                let gain = |c: usize, k_in: f64| k_in - totals[c] * strength[i] / m2;
                let stay = gain(own, links[&own]);
                let mut best = (own, stay);
                for (&c, &k_in) in &links {
                    let g = gain(c, k_in);
                    if g > best.1 + MIN_GAIN {
                        best = (c, g);
                    }
                }
                community[i] = best.0;
                totals[best.0] += strength[i];
                if best.0 != own {
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (renumber(&community), moved_any)
    }

    fn aggregate(&self, community: &[usize]) -> Level {
        let k = community.iter().max().map_or(0, |c| c + 1);
        let mut adjacency = vec![BTreeMap::new(); k];
        let mut self_loops = vec![0.0; k];
        for i in 0..self.len() {
            self_loops[community[i]] += self.self_loops[i];
            for (&j, &w) in &self.adjacency[i] {
                let (a, b) = (community[i], community[j]);
                if a == b {
                    // each internal edge is seen from both ends
                    self_loops[a] += w / 2.0;
                } else {
                    *adjacency[a].entry(b).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adjacency,
            self_loops,
        }
    }
}

fn renumber(community: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    community
        .iter()
        .map(|c| {
            let next = map.len();
            *map.entry(*c).or_insert(next)
        })
        .collect()
}

/// Modularity of a partition of the subgraph induced by `nodes`.
pub fn modularity(g: &Multigraph, parts: &[BTreeSet<NodeId>]) -> f64 {
    let nodes: BTreeSet<NodeId> = parts.iter().flatten().copied().collect();
    let owner: BTreeMap<NodeId, usize> = parts
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |v| (*v, i)))
        .collect();
    let mut m = 0.0;
    let mut internal = vec![0.0; parts.len()];
    let mut totals = vec![0.0; parts.len()];
    for &v in &nodes {
        for (w, k) in g.neighbors(v) {
            if !nodes.contains(&w) {
                continue;
            }
            let k = k as f64;
            totals[owner[&v]] += k;
            if v < w {
                m += k;
                if owner[&v] == owner[&w] {
                    internal[owner[&v]] += k;
                }
            }
        }
    }
    if m == 0.0 {
        return 0.0;
    }
    (0..parts.len())
        .map(|c| internal[c] / m - (totals[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Louvain communities of the subgraph induced by `set`, ordered by
/// smallest node id.
pub fn communities(g: &Multigraph, set: &BTreeSet<NodeId>, rng: &mut Rng) -> Vec<BTreeSet<NodeId>> {
    let nodes: Vec<NodeId> = set.iter().copied().collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let adjacency = nodes
        .iter()
        .map(|v| {
            g.neighbors(*v)
                .filter_map(|(w, m)| index.get(&w).map(|&j| (j, m as f64)))
                .collect()
        })
        .collect();
    let mut level = Level {
        adjacency,
        self_loops: vec![0.0; nodes.len()],
    };
    // membership[i] = community of original node i at the current level
    let mut membership: Vec<usize> = (0..nodes.len()).collect();
    loop {
        let (community, moved) = level.local_moves(rng);
        if !moved {
            break;
        }
        for c in membership.iter_mut() {
            *c = community[*c];
        }
        level = level.aggregate(&community);
        if level.len() == 1 {
            break;
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (i, c) in membership.into_iter().enumerate() {
        groups.entry(c).or_default().insert(nodes[i]);
    }
    let mut out: Vec<BTreeSet<NodeId>> = groups.into_values().collect();
    out.sort_by_key(|s| *s.iter().next().unwrap());
    out
}
