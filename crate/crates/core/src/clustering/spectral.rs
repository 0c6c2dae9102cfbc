//! Fiedler-vector bipartition by shifted power iteration.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;

use crate::multigraph::{Multigraph, NodeId};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct FiedlerConfig {
    pub max_iterations: usize,
    /// Bound on `‖Lx − (xᵀLx)x‖` for a unit vector `x`.
    pub tolerance: f64,
    /// Entries with `|x_i| <= tie_tolerance · max|x|` count as zero.
    pub tie_tolerance: f64,
}

impl Default for FiedlerConfig {
    fn default() -> Self {
        FiedlerConfig {
            max_iterations: 10_000,
            tolerance: 1e-8,
            tie_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NotConverged {
    pub iterations: usize,
    pub residual: f64,
}

/// Sparse weighted Laplacian of the subgraph induced by `nodes`.
struct Laplacian<T> {
    degree: Vec<T>,
    adjacency: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> Laplacian<T> {
    fn new(g: &Multigraph, nodes: &[NodeId]) -> Self {
        let index: BTreeMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let adjacency: Vec<Vec<(usize, T)>> = nodes
            .iter()
            .map(|v| {
                g.neighbors(*v)
                    .filter_map(|(w, m)| index.get(&w).map(|&j| (j, T::of(m as f64))))
                    .collect()
            })
            .collect();
        let degree = adjacency
            .iter()
            .map(|row| row.iter().map(|(_, w)| *w).sum())
            .collect();
        Laplacian { degree, adjacency }
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (i, row) in self.adjacency.iter().enumerate() {
            let mut acc = self.degree[i] * x[i];
            for &(j, w) in row {
                acc = acc - w * x[j];
            }
            out[i] = acc;
        }
    }
}

fn deflate_and_normalize<T: Scalar>(x: &mut [T]) -> T {
    let mean = x.iter().copied().sum::<T>() / T::of_usize(x.len());
    x.iter_mut().for_each(|v| *v = *v - mean);
    let norm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if norm > T::zero() {
        x.iter_mut().for_each(|v| *v = *v / norm);
    }
    norm
}

/// Eigenvector of the second-smallest Laplacian eigenvalue of the subgraph
/// induced by `nodes`, entries in the order of `nodes`.
pub fn fiedler_vector<T: Scalar>(
    g: &Multigraph,
    nodes: &[NodeId],
    config: &FiedlerConfig,
    rng: &mut Rng,
) -> Result<Vec<T>, NotConverged> {
    let n = nodes.len();
    let lap = Laplacian::<T>::new(g, nodes);
    let max_degree = lap.degree.iter().copied().fold(T::zero(), T::max);
    // cI − L has the same eigenvectors with the order reversed; c bounds λ_max.
    let shift = T::of(2.0) * max_degree + T::one();
    let mut x: Vec<T> = (0..n).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
    deflate_and_normalize(&mut x);
    let mut lx = vec![T::zero(); n];
    let tol = T::of(config.tolerance);
    let mut residual = T::infinity();
    for iteration in 0..config.max_iterations {
        lap.apply(&x, &mut lx);
        let rayleigh: T = x.iter().zip(&lx).map(|(a, b)| *a * *b).sum();
        residual = x
            .iter()
            .zip(&lx)
            .map(|(a, b)| {
                let r = *b - rayleigh * *a;
                r * r
            })
            .sum::<T>()
            .sqrt();
        if residual <= tol && iteration > 0 {
            return Ok(x);
        }
        for i in 0..n {
            x[i] = shift * x[i] - lx[i];
        }
        if deflate_and_normalize(&mut x) == T::zero() {
            break;
        }
    }
    Err(NotConverged {
        iterations: config.max_iterations,
        residual: residual.to_f64_lossy(),
    })
}

/// Splits `set` by the sign of its Fiedler vector. Near-zero entries join the
/// smaller side. `None` when the iteration fails or a side would be empty.
pub fn fiedler_split<T: Scalar>(
    g: &Multigraph,
    set: &BTreeSet<NodeId>,
    config: &FiedlerConfig,
    rng: &mut Rng,
) -> Option<Vec<BTreeSet<NodeId>>> {
    let nodes: Vec<NodeId> = set.iter().copied().collect();
    let x = match fiedler_vector::<T>(g, &nodes, config, rng) {
        Ok(x) => x,
        Err(e) => {
            log::debug!(
                "fiedler iteration did not converge on {} nodes after {} iterations (residual {:e})",
                nodes.len(),
                e.iterations,
                e.residual
            );
            return None;
        }
    };
    let scale = x.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let tie = T::of(config.tie_tolerance) * scale;
    let mut positive = BTreeSet::new();
    let mut negative = BTreeSet::new();
    let mut ties = Vec::new();
    for (v, value) in nodes.iter().zip(&x) {
        if value.abs() <= tie {
            ties.push(*v);
        } else if *value > T::zero() {
            positive.insert(*v);
        } else {
            negative.insert(*v);
        }
    }
    let smaller = if positive.len() <= negative.len() {
        &mut positive
    } else {
        &mut negative
    };
    smaller.extend(ties);
    if positive.is_empty() || negative.is_empty() {
        return None;
    }
    Some(vec![positive, negative])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};

    fn two_triangles() -> Multigraph {
        Multigraph::from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    /// Dense Jacobi eigen-decomposition, used as an independent oracle.
    #[allow(clippy::needless_range_loop)]
    fn jacobi_eigenvectors(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = a.len();
        let mut v: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let values = (0..n).map(|i| a[i][i]).collect();
        (values, v)
    }

    fn dense_laplacian(g: &Multigraph) -> Vec<Vec<f64>> {
        let ids: Vec<NodeId> = g.nodes().collect();
        ids.iter()
            .map(|&u| {
                ids.iter()
                    .map(|&v| {
                        if u == v {
                            g.degree(u) as f64
                        } else {
                            -(g.multiplicity(u, v) as f64)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_triangles_match_dense_oracle() {
        let g = two_triangles();
        let (values, vectors) = jacobi_eigenvectors(dense_laplacian(&g));
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
        let second = order[1];
        let oracle_positive: BTreeSet<NodeId> = (0..6)
            .filter(|&i| vectors[i][second] > 0.0)
            .map(|i| NodeId(i as u32))
            .collect();
        let expected_sides = [
            oracle_positive.clone(),
            (0..6)
                .map(NodeId)
                .filter(|v| !oracle_positive.contains(v))
                .collect(),
        ];

        let mut rng = substream(4, Stream::Clustering);
        let set: BTreeSet<NodeId> = g.nodes().collect();
        let parts = fiedler_split::<f64>(&g, &set, &FiedlerConfig::default(), &mut rng).unwrap();
        assert!(parts.iter().all(|p| expected_sides.contains(p)));
        let triangles: [BTreeSet<NodeId>; 2] =
            [[0, 1, 2].map(NodeId).into(), [3, 4, 5].map(NodeId).into()];
        assert!(parts.iter().all(|p| triangles.contains(p)));
    }

    #[test]
    fn k2_splits_into_singletons() {
        let g = Multigraph::from_edges([(0, 1)]).unwrap();
        let set: BTreeSet<NodeId> = g.nodes().collect();
        let mut rng = substream(0, Stream::Clustering);
        let mut parts =
            fiedler_split::<f64>(&g, &set, &FiedlerConfig::default(), &mut rng).unwrap();
        parts.sort();
        assert_eq!(
            parts,
            vec![BTreeSet::from([NodeId(0)]), BTreeSet::from([NodeId(1)])]
        );
    }

    #[test]
    fn path_middle_tie_goes_to_smaller_side() {
        // P3: Fiedler vector (1, 0, -1); the centre is a tie.
        let g = Multigraph::from_edges([(0, 1), (1, 2)]).unwrap();
        let set: BTreeSet<NodeId> = g.nodes().collect();
        let mut rng = substream(1, Stream::Clustering);
        let parts = fiedler_split::<f64>(&g, &set, &FiedlerConfig::default(), &mut rng).unwrap();
        let sizes: Vec<usize> = parts.iter().map(BTreeSet::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 3);
        assert!(sizes.contains(&1) && sizes.contains(&2));
        assert!(parts.iter().any(|p| p.contains(&NodeId(1)) && p.len() == 2));
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let g = two_triangles();
        let nodes: Vec<NodeId> = g.nodes().collect();
        let config = FiedlerConfig {
            max_iterations: 1,
            ..FiedlerConfig::default()
        };
        let mut rng = substream(2, Stream::Clustering);
        let err = fiedler_vector::<f64>(&g, &nodes, &config, &mut rng).unwrap_err();
        assert_eq!(err.iterations, 1);
        assert!(err.residual > 0.0);
    }

    #[test]
    fn f32_vector_separates_triangles() {
        let g = two_triangles();
        let nodes: Vec<NodeId> = g.nodes().collect();
        let config = FiedlerConfig {
            tolerance: 1e-4,
            ..FiedlerConfig::default()
        };
        let mut rng = substream(3, Stream::Clustering);
        let x = fiedler_vector::<f32>(&g, &nodes, &config, &mut rng).unwrap();
        assert!(x[0] * x[3] < 0.0);
        assert!(x[0] * x[1] > 0.0);
    }
}
