use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BoundarySpec, GraphError, Multigraph, NodeId, NodeLabel};

/// Largest graph accepted by [`canonical_form`].
pub const DEFAULT_CANONICAL_CAP: usize = 10;

/// Isomorphism-invariant encoding of a small labeled multigraph together with
/// boundary degrees. Equal keys mean there is a bijection preserving labels,
/// boundary degrees and multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(Vec<u32>);

impl CanonicalKey {
    /// Wraps a caller-built encoding, for graphs too large to canonise.
    pub fn from_literal(encoding: Vec<u32>) -> Self {
        CanonicalKey(encoding)
    }
}

/// Canonical key plus the node order that realises it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub order: Vec<NodeId>,
}

fn label_code(label: NodeLabel) -> u32 {
    match label {
        NodeLabel::Terminal => 0,
        NodeLabel::Nonterminal(w) => w + 1,
    }
}

/// Stable colour classes by iterated neighbourhood refinement. Returns one
/// colour rank per node index.
fn refine_colors(nodes: &[NodeId], g: &Multigraph, boundary: &BoundarySpec) -> Vec<usize> {
    let n = nodes.len();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let seed: Vec<(u32, u32, u32)> = nodes
        .iter()
        .map(|v| {
            (
                label_code(g.label(*v).unwrap()),
                boundary.get(v).copied().unwrap_or(0),
                g.degree(*v),
            )
        })
        .collect();
    let mut colors = ranks(&seed);
    let mut classes = distinct(&colors);
    loop {
        let signature: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(usize, u32)> = g
                    .neighbors(nodes[i])
                    .filter_map(|(w, m)| index.get(&w).map(|&j| (colors[j], m)))
                    .collect();
                nb.sort_unstable();
                (colors[i], nb)
            })
            .collect();
        let next = ranks(&signature);
        let next_classes = distinct(&next);
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn ranks<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    values
        .iter()
        .map(|v| sorted.binary_search(v).unwrap())
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Search<'a> {
    matrix: Vec<Vec<u32>>,
    /// For each position, the node indices allowed there.
    cell_of_position: Vec<&'a [usize]>,
    used: Vec<bool>,
    order: Vec<usize>,
    encoding: Vec<u32>,
    best: Option<(Vec<u32>, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        let n = self.matrix.len();
        if depth == n {
            let better = match &self.best {
                None => true,
                Some((best, _)) => self.encoding < *best,
            };
            if better {
                self.best = Some((self.encoding.clone(), self.order.clone()));
            }
            return;
        }
        let cell = self.cell_of_position[depth];
        for &v in cell {
            if self.used[v] {
                continue;
            }
            let start = self.encoding.len();
            for &u in &self.order {
                self.encoding.push(self.matrix[v][u]);
            }
            let prune = match &self.best {
                Some((best, _)) => self.encoding[..] > best[..self.encoding.len()],
                None => false,
            };
            if !prune {
                self.used[v] = true;
                self.order.push(v);
                self.run(depth + 1);
                self.order.pop();
                self.used[v] = false;
            }
            self.encoding.truncate(start);
        }
    }
}

/// Canonical key of `(g, boundary)`. Nodes absent from `boundary` count as
/// boundary degree zero. Exhaustive within colour classes, so only small
/// graphs (`<= cap` nodes) are accepted.
pub fn canonical_form(
    g: &Multigraph,
    boundary: &BoundarySpec,
    cap: usize,
) -> Result<CanonicalForm, GraphError> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let n = nodes.len();
    if n > cap {
        return Err(GraphError::UnsupportedSize { nodes: n, cap });
    }
    let colors = refine_colors(&nodes, g, boundary);
    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by_key(|&i| colors[i]);

    // Contiguous cells in colour order.
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &i in &by_color {
        match cells.last_mut() {
            Some(cell) if colors[cell[0]] == colors[i] => cell.push(i),
            _ => cells.push(vec![i]),
        }
    }
    let mut cell_of_position: Vec<&[usize]> = Vec::with_capacity(n);
    for cell in &cells {
        for _ in 0..cell.len() {
            cell_of_position.push(cell);
        }
    }

    let matrix: Vec<Vec<u32>> = nodes
        .iter()
        .map(|&u| nodes.iter().map(|&v| g.multiplicity(u, v)).collect())
        .collect();

    let mut search = Search {
        matrix,
        cell_of_position,
        used: vec![false; n],
        order: Vec::with_capacity(n),
        encoding: Vec::new(),
        best: None,
    };
    search.run(0);
    let (encoding, order) = search.best.unwrap_or_default();

    let mut key = Vec::with_capacity(1 + 2 * n + encoding.len());
    key.push(n as u32);
    for &i in &order {
        key.push(label_code(g.label(nodes[i]).unwrap()));
        key.push(boundary.get(&nodes[i]).copied().unwrap_or(0));
    }
    key.extend(encoding);
    Ok(CanonicalForm {
        key: CanonicalKey(key),
        order: order.into_iter().map(|i| nodes[i]).collect(),
    })
}
