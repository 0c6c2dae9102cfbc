//! Induced counts of connected 2-, 3- and 4-node graphlets.
//!
//! Non-induced counts come from degree, triangle and co-degree formulas and
//! are converted to induced counts through the overlap matrix of the six
//! 4-node types.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::multigraph::{Multigraph, NodeId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphletCensus {
    pub edges: u64,
    pub triangles: u64,
    pub open_triangles: u64,
    pub four_cliques: u64,
    pub chordal_cycles: u64,
    pub tailed_triangles: u64,
    pub four_cycles: u64,
    pub four_stars: u64,
    pub four_paths: u64,
}

impl GraphletCensus {
    pub const NAMES: [&'static str; 9] = [
        "g2_1", "g3_1", "g3_2", "g4_1", "g4_2", "g4_3", "g4_4", "g4_5", "g4_6",
    ];

    pub fn as_array(&self) -> [u64; 9] {
        [
            self.edges,
            self.triangles,
            self.open_triangles,
            self.four_cliques,
            self.chordal_cycles,
            self.tailed_triangles,
            self.four_cycles,
            self.four_stars,
            self.four_paths,
        ]
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Simple graph on `0..n`: sorted neighbour lists and an edge set.
struct Simple {
    neighbors: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
}

impl Simple {
    fn new(g: &Multigraph) -> Simple {
        let ids: Vec<NodeId> = g.nodes().collect();
        let index = |v: NodeId| ids.binary_search(&v).unwrap();
        let neighbors: Vec<Vec<usize>> = ids
            .iter()
            .map(|v| g.neighbors(*v).map(|(w, _)| index(w)).collect())
            .collect();
        let edges = g.edges().map(|(u, v, _)| (index(u), index(v))).collect();
        Simple { neighbors, edges }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn degree(&self, v: usize) -> u64 {
        self.neighbors[v].len() as u64
    }

    fn common(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = (&self.neighbors[u], &self.neighbors[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

/// Induced graphlet counts of `g` with multiplicities ignored.
pub fn graphlet_census(g: &Multigraph) -> GraphletCensus {
    let s = Simple::new(g);
    let n = s.neighbors.len();

    let mut edge_triangles: Vec<((usize, usize), u64)> = Vec::with_capacity(s.edges.len());
    let mut node_triangles = vec![0u64; n];
    let mut k4 = 0u64;
    for u in 0..n {
        for &v in s.neighbors[u].iter().filter(|v| **v > u) {
            let common = s.common(u, v);
            // the edge opposite each apex
            for &w in &common {
                node_triangles[w] += 1;
            }
            // K4: u < v < w < x with all pairs adjacent
            for (a, &w) in common.iter().enumerate() {
                if w <= v {
                    continue;
                }
                k4 += common[a + 1..]
                    .iter()
                    .filter(|&&x| s.adjacent(w, x))
                    .count() as u64;
            }
            edge_triangles.push(((u, v), common.len() as u64));
        }
    }
    // each triangle is seen once from each of its three edges
    let triangles: u64 = edge_triangles.iter().map(|(_, t)| t).sum::<u64>() / 3;

    let wedges: u64 = (0..n).map(|v| choose2(s.degree(v))).sum();
    let star_n: u64 = (0..n).map(|v| choose3(s.degree(v))).sum();
    let path_n: u64 = edge_triangles
        .iter()
        .map(|((u, v), _)| (s.degree(*u) - 1) * (s.degree(*v) - 1))
        .sum::<u64>()
        - 3 * triangles;
    let tailed_n: u64 = (0..n)
        .map(|v| node_triangles[v] * s.degree(v).saturating_sub(2))
        .sum();
    let diamond_n: u64 = edge_triangles.iter().map(|(_, t)| choose2(*t)).sum();
    let mut cycle_pairs = 0u64;
    for u in 0..n {
        let mut codegree: HashMap<usize, u64> = HashMap::new();
        for &w in &s.neighbors[u] {
            for &x in s.neighbors[w].iter().filter(|x| **x > u) {
                *codegree.entry(x).or_insert(0) += 1;
            }
        }
        cycle_pairs += codegree.values().map(|c| choose2(*c)).sum::<u64>();
    }
    // each 4-cycle has two diagonals
    let cycle_n = cycle_pairs / 2;

    let k4 = k4 as i128;
    let diamond = diamond_n as i128 - 6 * k4;
    let cycle = cycle_n as i128 - diamond - 3 * k4;
    let tailed = tailed_n as i128 - 4 * diamond - 12 * k4;
    let path = path_n as i128 - 2 * tailed - 4 * cycle - 6 * diamond - 12 * k4;
    let star = star_n as i128 - tailed - 2 * diamond - 4 * k4;
    let as_count = |x: i128| u64::try_from(x).expect("induced counts are non-negative");

    GraphletCensus {
        edges: s.edges.len() as u64,
        triangles,
        open_triangles: wedges - 3 * triangles,
        four_cliques: as_count(k4),
        chordal_cycles: as_count(diamond),
        tailed_triangles: as_count(tailed),
        four_cycles: as_count(cycle),
        four_stars: as_count(star),
        four_paths: as_count(path),
    }
}

/// Mean and maximum degree of the simple graph underlying `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub mean: f64,
    pub max: u64,
}

pub fn degree_summary(g: &Multigraph) -> DegreeSummary {
    let degrees: Vec<u64> = g.nodes().map(|v| g.neighbors(v).count() as u64).collect();
    let mean = if degrees.is_empty() {
        0.0
    } else {
        degrees.iter().sum::<u64>() as f64 / degrees.len() as f64
    };
    DegreeSummary {
        mean,
        max: degrees.into_iter().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u32, u32)]) -> Multigraph {
        Multigraph::from_edges(edges.iter().copied()).unwrap()
    }

    #[test]
    fn k4_counts() {
        let c = graphlet_census(&graph(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]));
        assert_eq!(
            c,
            GraphletCensus {
                edges: 6,
                triangles: 4,
                four_cliques: 1,
                ..Default::default()
            }
        );
    }

    #[test]
    fn p4_counts() {
        let c = graphlet_census(&graph(&[(0, 1), (1, 2), (2, 3)]));
        assert_eq!(
            c,
            GraphletCensus {
                edges: 3,
                open_triangles: 2,
                four_paths: 1,
                ..Default::default()
            }
        );
    }

    #[test]
    fn single_type_examples() {
        let star = graphlet_census(&graph(&[(0, 1), (0, 2), (0, 3)]));
        assert_eq!((star.four_stars, star.open_triangles), (1, 3));
        let cycle = graphlet_census(&graph(&[(0, 1), (1, 2), (2, 3), (3, 0)]));
        assert_eq!(
            (cycle.four_cycles, cycle.four_paths, cycle.open_triangles),
            (1, 0, 4)
        );
        let tailed = graphlet_census(&graph(&[(0, 1), (1, 2), (2, 0), (2, 3)]));
        assert_eq!(
            (
                tailed.tailed_triangles,
                tailed.triangles,
                tailed.open_triangles
            ),
            (1, 1, 2)
        );
        let diamond = graphlet_census(&graph(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]));
        assert_eq!(
            (
                diamond.chordal_cycles,
                diamond.triangles,
                diamond.four_cycles
            ),
            (1, 2, 0)
        );
    }

    #[test]
    fn multiplicities_are_ignored() {
        let mut g = graph(&[(0, 1), (1, 2)]);
        g.add_edge(NodeId(0), NodeId(1), 3).unwrap();
        assert_eq!(
            graphlet_census(&g),
            graphlet_census(&graph(&[(0, 1), (1, 2)]))
        );
    }

    #[test]
    fn degree_summary_of_star() {
        let d = degree_summary(&graph(&[(0, 1), (0, 2), (0, 3)]));
        assert_eq!(d.max, 3);
        assert!((d.mean - 1.5).abs() < 1e-12);
    }
}
