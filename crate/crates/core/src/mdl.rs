//! Description lengths of graphs, rules and grammars in bits.
//!
//! Integers are charged their Elias-γ codeword length. Every γ argument that
//! can legitimately be zero (matrix entries, ω, boundary degrees) is shifted
//! by one first. The multiplicity matrix of an undirected graph is charged
//! over its upper triangle including the diagonal.

use std::collections::{BTreeMap, BTreeSet};
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Grammar, Rule};
use crate::multigraph::{BoundarySpec, Multigraph, NodeId, NodeLabel};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdlError {
    #[error("elias gamma encodes positive integers only")]
    GammaZero,
    #[error("description length of an empty graph is undefined")]
    EmptyGraph,
    #[error("description length of an empty grammar is undefined")]
    EmptyGrammar,
}

/// A (possibly fractional) number of bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitLength<T>(pub T);

impl<T: Scalar> BitLength<T> {
    pub fn zero() -> Self {
        BitLength(T::zero())
    }

    pub fn bits(self) -> T {
        self.0
    }
}

impl<T: Scalar> Add for BitLength<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BitLength(self.0 + rhs.0)
    }
}

impl<T: Scalar> AddAssign for BitLength<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.0 = self.0 + rhs.0;
    }
}

impl<T: Scalar> Sum for BitLength<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), Add::add)
    }
}

/// Length of the Elias-γ codeword for `n`: `2⌊lg n⌋ + 1`.
pub fn gamma_len(n: u64) -> Result<u32, MdlError> {
    if n == 0 {
        return Err(MdlError::GammaZero);
    }
    Ok(2 * (63 - n.leading_zeros()) + 1)
}

/// γ length of `n + 1`; total for every `u32`.
pub fn gamma_len_shifted(n: u32) -> u32 {
    gamma_len(n as u64 + 1).unwrap()
}

/// Endpoint after contraction: `Ok(group)` or `Err(node)`.
type Endpoint = Result<usize, NodeId>;

fn lg<T: Scalar>(x: u64) -> T {
    T::of(x as f64).log2()
}

/// The integer summary a graph's description length depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlStats {
    pub nodes: u64,
    pub distinct_edges: u64,
    /// `Σ γ(κ + 1)` over stored pairs.
    pub edge_gamma: u64,
    /// Count of nodes per nonterminal size.
    pub nonterminal_sizes: BTreeMap<u32, u64>,
}

impl DlStats {
    pub fn of(g: &Multigraph) -> Self {
        let mut nonterminal_sizes = BTreeMap::new();
        for (_, label) in g.labeled_nodes() {
            if let NodeLabel::Nonterminal(w) = label {
                *nonterminal_sizes.entry(w).or_insert(0) += 1;
            }
        }
        let mut distinct_edges = 0;
        let mut edge_gamma = 0;
        for (_, _, m) in g.edges() {
            distinct_edges += 1;
            edge_gamma += gamma_len_shifted(m) as u64;
        }
        DlStats {
            nodes: g.node_count() as u64,
            distinct_edges,
            edge_gamma,
            nonterminal_sizes,
        }
    }

    pub fn label_alphabet_size(&self) -> u64 {
        2 + self.nonterminal_sizes.len() as u64
    }

    /// `v + e` for the summarised graph.
    pub fn bits<T: Scalar>(&self) -> Result<BitLength<T>, MdlError> {
        if self.nodes == 0 {
            return Err(MdlError::EmptyGraph);
        }
        let lg_labels: T = lg(self.label_alphabet_size());
        let vertices = lg::<T>(self.nodes) + T::of(self.nodes as f64) * lg_labels;
        let pairs = self.nodes * (self.nodes + 1) / 2;
        // Zero entries contribute γ(1) = 1 each.
        let matrix = pairs - self.distinct_edges + self.edge_gamma;
        let lg_edges = if self.distinct_edges == 0 {
            T::zero()
        } else {
            lg(self.distinct_edges)
        };
        let edges = lg_edges + lg_labels * T::of(matrix as f64);
        Ok(BitLength(vertices + edges))
    }

    /// Summary of `g` after contracting each of the disjoint `groups` into a
    /// single nonterminal labeled with its boundary size. `self` must be
    /// `DlStats::of(g)`.
    pub fn after_contracting(&self, g: &Multigraph, groups: &[&BTreeSet<NodeId>]) -> DlStats {
        let mut owner: BTreeMap<NodeId, usize> = BTreeMap::new();
        for (i, group) in groups.iter().enumerate() {
            for &v in group.iter() {
                owner.insert(v, i);
            }
        }
        let mut next = self.clone();
        let mut removed_nodes = 0u64;
        let mut omegas = vec![0u32; groups.len()];
        let mut merged: BTreeMap<(Endpoint, Endpoint), u32> = BTreeMap::new();
        let key = |v: NodeId| owner.get(&v).copied().ok_or(v);

        for (&v, &gi) in &owner {
            removed_nodes += 1;
            if let Some(NodeLabel::Nonterminal(w)) = g.label(v) {
                let count = next.nonterminal_sizes.get_mut(&w).unwrap();
                *count -= 1;
                if *count == 0 {
                    next.nonterminal_sizes.remove(&w);
                }
            }
            for (w, m) in g.neighbors(v) {
                let other = key(w);
                // Visit each stored pair once.
                if other.is_ok() && w < v {
                    continue;
                }
                next.distinct_edges -= 1;
                next.edge_gamma -= gamma_len_shifted(m) as u64;
                match other {
                    Ok(gj) if gj == gi => {}
                    _ => {
                        omegas[gi] += m;
                        if let Ok(gj) = other {
                            omegas[gj] += m;
                        }
                        let (a, b) = (Ok(gi), other);
                        let pair = if a <= b { (a, b) } else { (b, a) };
                        *merged.entry(pair).or_insert(0) += m;
                    }
                }
            }
        }
        for m in merged.values() {
            next.distinct_edges += 1;
            next.edge_gamma += gamma_len_shifted(*m) as u64;
        }
        for w in omegas {
            *next.nonterminal_sizes.entry(w).or_insert(0) += 1;
        }
        next.nodes = next.nodes - removed_nodes + groups.len() as u64;
        next
    }
}

/// `DL(H) = v + e`.
pub fn graph_dl<T: Scalar>(g: &Multigraph) -> Result<BitLength<T>, MdlError> {
    DlStats::of(g).bits()
}

/// `DL(l_P) = γ(ω + 1) + γ(f)`.
pub fn lhs_dl<T: Scalar>(omega: u32, frequency: u32) -> BitLength<T> {
    let f = gamma_len(frequency.max(1) as u64).unwrap();
    BitLength(T::of((gamma_len_shifted(omega) + f) as f64))
}

/// `DL(r_P) = DL(R) + Σ γ(b_deg + 1)`.
pub fn rhs_dl<T: Scalar>(
    rhs: &Multigraph,
    boundary: &BoundarySpec,
) -> Result<BitLength<T>, MdlError> {
    let graph = graph_dl::<T>(rhs)?;
    let degrees: u32 = rhs
        .nodes()
        .map(|v| gamma_len_shifted(boundary.get(&v).copied().unwrap_or(0)))
        .sum();
    Ok(graph + BitLength(T::of(degrees as f64)))
}

pub fn rule_dl<T: Scalar>(rule: &Rule) -> Result<BitLength<T>, MdlError> {
    Ok(lhs_dl(rule.omega, rule.frequency) + rhs_dl(&rule.rhs, &rule.boundary)?)
}

/// `DL(G) = Σ_P DL(l_P) + DL(r_P)` over the distinct rules.
pub fn grammar_dl<T: Scalar>(grammar: &Grammar) -> Result<BitLength<T>, MdlError> {
    if grammar.rules.is_empty() {
        return Err(MdlError::EmptyGrammar);
    }
    grammar.rules.iter().map(rule_dl).sum()
}

/// `DL(G) / DL(H)`.
pub fn compression_ratio<T: Scalar>(
    grammar: &Grammar,
    original: &Multigraph,
) -> Result<T, MdlError> {
    Ok(grammar_dl::<T>(grammar)?.0 / graph_dl::<T>(original)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// γ codeword as a bit string: ⌊lg n⌋ zeros followed by n in binary.
    fn gamma_bits(n: u64) -> String {
        let binary = format!("{:b}", n);
        format!("{}{}", "0".repeat(binary.len() - 1), binary)
    }

    /// Direct evaluation over the upper triangle of the multiplicity matrix.
    fn graph_dl_oracle(g: &Multigraph) -> f64 {
        let ids: Vec<NodeId> = g.nodes().collect();
        let n = ids.len() as f64;
        let l = g.label_alphabet_size() as f64;
        let e = g.edge_count() as f64;
        let mut sum = 0usize;
        for i in 0..ids.len() {
            for j in i..ids.len() {
                sum += gamma_bits(g.multiplicity(ids[i], ids[j]) as u64 + 1).len();
            }
        }
        let lg_e = if e == 0.0 { 0.0 } else { e.log2() };
        n.log2() + n * l.log2() + lg_e + l.log2() * sum as f64
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_len(1), Ok(1));
        assert_eq!(gamma_bits(2), "010");
        assert_eq!(gamma_len(2), Ok(3));
        assert_eq!(gamma_len(1000), Ok(19));
        assert_eq!(gamma_bits(1000).len(), 19);
        assert_eq!(gamma_len(0), Err(MdlError::GammaZero));
        assert_eq!(gamma_len(u64::MAX), Ok(127));
    }

    #[test]
    fn k3_graph_dl() {
        let g = Multigraph::from_edges([(0, 1), (1, 2), (0, 2)]).unwrap();
        let bits = graph_dl::<f64>(&g).unwrap().0;
        let expected = 3f64.log2() + 3.0 + 3f64.log2() + 12.0;
        assert!((bits - expected).abs() < 1e-12);
        assert!((bits - 18.17).abs() < 0.01);
        assert!((bits - graph_dl_oracle(&g)).abs() < 1e-12);
    }

    #[test]
    fn single_node_graph_dl() {
        let g = Multigraph::with_terminals(1);
        assert_eq!(graph_dl::<f64>(&g).unwrap().0, 2.0);
        assert_eq!(
            graph_dl::<f64>(&Multigraph::new()),
            Err(MdlError::EmptyGraph)
        );
    }

    #[test]
    fn triple_edge_graph_dl() {
        let mut g = Multigraph::with_terminals(2);
        g.add_edge(NodeId(0), NodeId(1), 3).unwrap();
        assert_eq!(graph_dl::<f64>(&g).unwrap().0, 10.0);
        assert_eq!(graph_dl_oracle(&g), 10.0);
    }

    #[test]
    fn f32_agrees_with_f64() {
        let g = Multigraph::from_edges([(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let a = graph_dl::<f64>(&g).unwrap().0;
        let b = graph_dl::<f32>(&g).unwrap().0 as f64;
        assert!((a - b).abs() < 1e-4);
    }

    #[test]
    fn lhs_examples() {
        assert_eq!(lhs_dl::<f64>(0, 1).0, 2.0);
        assert_eq!(lhs_dl::<f64>(5, 1).0, 6.0);
    }

    #[test]
    fn k3_rhs_dl() {
        let g = Multigraph::from_edges([(0, 1), (1, 2), (0, 2)]).unwrap();
        let b: BoundarySpec = g.nodes().map(|v| (v, 1)).collect();
        let bits = rhs_dl::<f64>(&g, &b).unwrap().0;
        assert!((bits - (graph_dl_oracle(&g) + 9.0)).abs() < 1e-12);
        assert!((bits - 27.17).abs() < 0.01);
    }

    #[test]
    fn contraction_preview_matches_real_contraction() {
        let g = Multigraph::from_edges([
            (0, 1),
            (1, 2),
            (2, 0),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 3),
            (0, 5),
        ])
        .unwrap();
        let a: BTreeSet<NodeId> = [0, 1].map(NodeId).into();
        let b: BTreeSet<NodeId> = [3, 4].map(NodeId).into();
        let preview = DlStats::of(&g).after_contracting(&g, &[&a, &b]);

        let mut h = g.clone();
        let (wa, _) = h.boundary(&a).unwrap();
        h.contract_in_place(&a, NodeLabel::Nonterminal(wa)).unwrap();
        let (wb, _) = h.boundary(&b).unwrap();
        h.contract_in_place(&b, NodeLabel::Nonterminal(wb)).unwrap();
        assert_eq!(preview, DlStats::of(&h));
    }

    #[test]
    fn adjacent_groups_merge_edges() {
        // two groups joined by a double connection
        let g = Multigraph::from_edges([(0, 1), (2, 3), (0, 2), (1, 3)]).unwrap();
        let a: BTreeSet<NodeId> = [0, 1].map(NodeId).into();
        let b: BTreeSet<NodeId> = [2, 3].map(NodeId).into();
        let preview = DlStats::of(&g).after_contracting(&g, &[&a, &b]);
        assert_eq!(preview.nodes, 2);
        assert_eq!(preview.distinct_edges, 1);
        assert_eq!(preview.edge_gamma, gamma_len(3).unwrap() as u64);
        assert_eq!(preview.nonterminal_sizes, BTreeMap::from([(2, 2)]));
    }

    #[test]
    fn large_graph_stats_do_not_overflow() {
        let stats = DlStats {
            nodes: 1_000_000,
            distinct_edges: 5_000_000,
            edge_gamma: 15_000_000,
            nonterminal_sizes: BTreeMap::new(),
        };
        let bits = stats.bits::<f64>().unwrap().0;
        assert!(bits.is_finite() && bits > 5e11);
    }
}
