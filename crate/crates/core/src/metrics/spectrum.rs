//! Adjacency spectra and the λ-distance between graphs.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, RealField, SymmetricEigen};
use rand::Rng as _;
use thiserror::Error;

use crate::multigraph::{Multigraph, NodeId};
use crate::rng::{substream, Stream};
use crate::scalar::Scalar;

/// Graphs up to this size get the full dense spectrum.
pub const DENSE_LIMIT: usize = 3000;
/// Eigenvalue count kept for larger graphs.
pub const DEFAULT_TOP_K: usize = 200;
const MAX_SWEEPS_PER_VALUE: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error(
        "eigensolver did not converge on a {size}x{size} matrix within {iterations} iterations"
    )]
    NotConverged { size: usize, iterations: usize },
}

/// Eigenvalues ordered by descending magnitude, equal magnitudes by
/// descending signed value.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn from_unsorted(mut values: Vec<T>) -> Self {
        sort_by_magnitude(&mut values);
        Spectrum { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean distance with the shorter list zero-padded.
    pub fn distance(&self, other: &Spectrum<T>) -> T {
        let n = self.len().max(other.len());
        let at = |s: &Spectrum<T>, i: usize| s.values.get(i).copied().unwrap_or_else(T::zero);
        (0..n)
            .map(|i| {
                let d = at(self, i) - at(other, i);
                d * d
            })
            .sum::<T>()
            .sqrt()
    }
}

/// Magnitudes are compared on a grid of `√ε · max|λ|` so that `±λ` pairs
/// split by rounding still count as ties.
fn sort_by_magnitude<T: Scalar>(values: &mut [T]) {
    let largest = values.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let step = (T::epsilon().sqrt() * largest).to_f64_lossy();
    let grid = |v: T| {
        if step > 0.0 {
            (v.abs().to_f64_lossy() / step).round() as i64
        } else {
            0
        }
    };
    values.sort_by(|a, b| {
        grid(*b)
            .cmp(&grid(*a))
            .then(b.partial_cmp(a).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvalues of a dense symmetric matrix, unsorted.
pub fn symmetric_eigenvalues<T: Scalar + RealField>(
    a: DMatrix<T>,
) -> Result<Vec<T>, SpectrumError> {
    let size = a.nrows();
    let cap = MAX_SWEEPS_PER_VALUE * size.max(1);
    let eig = SymmetricEigen::try_new(a, T::default_epsilon(), cap).ok_or(
        SpectrumError::NotConverged {
            size,
            iterations: cap,
        },
    )?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Simple adjacency lists (multiplicities ignored) indexed `0..n`.
fn simple_adjacency(g: &Multigraph) -> Vec<Vec<usize>> {
    let ids: Vec<NodeId> = g.nodes().collect();
    let index = |v: NodeId| ids.binary_search(&v).unwrap();
    ids.iter()
        .map(|v| g.neighbors(*v).map(|(w, _)| index(w)).collect())
        .collect()
}

/// Lanczos with full reorthogonalisation: approximations of the `k`
/// eigenvalues of largest magnitude, from a Krylov space of `steps`
/// dimensions.
pub fn lanczos_top_k<T: Scalar + RealField>(
    adjacency: &[Vec<usize>],
    k: usize,
    steps: usize,
) -> Result<Vec<T>, SpectrumError> {
    let n = adjacency.len();
    let steps = steps.min(n).max(1);
    let mut rng = substream(0, Stream::TieBreak);
    let mut q = DVector::<T>::from_fn(n, |_, _| T::of(rng.gen_range(-1.0..1.0)));
    q.normalize_mut();
    let mut basis: Vec<DVector<T>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for j in 0..steps {
        let qj = &basis[j];
        let mut w = DVector::<T>::from_fn(n, |i, _| adjacency[i].iter().map(|&c| qj[c]).sum());
        alpha.push(qj.dot(&w));
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, T::one());
            }
        }
        let norm = w.norm();
        if j + 1 == steps || norm <= T::of(1e-10) {
            break;
        }
        beta.push(norm);
        basis.push(w / norm);
    }
    let m = alpha.len();
    let tridiagonal = DMatrix::<T>::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => alpha[i],
        1 => beta[i.min(j)],
        _ => T::zero(),
    });
    let mut values = symmetric_eigenvalues(tridiagonal)?;
    sort_by_magnitude(&mut values);
    values.truncate(k);
    Ok(values)
}

/// Adjacency spectrum of `g` with multiplicities collapsed. Graphs above
/// [`DENSE_LIMIT`] nodes keep only the [`DEFAULT_TOP_K`] dominant values.
pub fn adjacency_spectrum<T: Scalar + RealField>(
    g: &Multigraph,
) -> Result<Spectrum<T>, SpectrumError> {
    if g.is_empty() {
        return Err(SpectrumError::EmptyGraph);
    }
    let adjacency = simple_adjacency(g);
    let n = adjacency.len();
    if n > DENSE_LIMIT {
        let values = lanczos_top_k(&adjacency, DEFAULT_TOP_K, 2 * DEFAULT_TOP_K + 20)?;
        return Ok(Spectrum::from_unsorted(values));
    }
    let mut a = DMatrix::<T>::zeros(n, n);
    for (i, row) in adjacency.iter().enumerate() {
        for &j in row {
            a[(i, j)] = T::one();
        }
    }
    Ok(Spectrum::from_unsorted(symmetric_eigenvalues(a)?))
}

/// `√Σ(ŝᵢ − sᵢ)²` between magnitude-sorted adjacency spectra.
pub fn lambda_distance<T: Scalar + RealField>(
    h1: &Multigraph,
    h2: &Multigraph,
) -> Result<T, SpectrumError> {
    Ok(adjacency_spectrum::<T>(h1)?.distance(&adjacency_spectrum(h2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Multigraph {
        Multigraph::from_edges((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    fn path(n: u32) -> Multigraph {
        Multigraph::from_edges((0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn cycle(n: u32) -> Multigraph {
        Multigraph::from_edges((0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn complete_graph_spectrum() {
        let s = adjacency_spectrum::<f64>(&complete(5)).unwrap();
        assert!(close(&s.values, &[4.0, -1.0, -1.0, -1.0, -1.0], 1e-10));
    }

    #[test]
    fn path_spectrum_matches_closed_form() {
        // P_n: 2 cos(πk/(n+1))
        let n = 9;
        let expected = Spectrum::from_unsorted(
            (1..=n)
                .map(|k| 2.0 * (std::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos())
                .collect(),
        );
        let s = adjacency_spectrum::<f64>(&path(n as u32)).unwrap();
        assert!(close(&s.values, &expected.values, 1e-10));
    }

    #[test]
    fn cycle_spectrum_matches_closed_form() {
        let n = 12;
        let expected = Spectrum::from_unsorted(
            (0..n)
                .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
                .collect(),
        );
        let s = adjacency_spectrum::<f64>(&cycle(n as u32)).unwrap();
        assert!(close(&s.values, &expected.values, 1e-10));
    }

    #[test]
    fn k3_versus_p3() {
        let d = lambda_distance::<f64>(&complete(3), &path(3)).unwrap();
        let r2 = 2f64.sqrt();
        let expected = ((2.0 - r2).powi(2) + (-1.0 + r2).powi(2) + 1.0).sqrt();
        assert!((d - expected).abs() < 1e-12);
        assert!((d - 1.2310).abs() < 1e-3);
    }

    #[test]
    fn k2_versus_single_node_is_root_two() {
        let d = lambda_distance::<f64>(&complete(2), &Multigraph::with_terminals(1)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn multiplicities_are_ignored() {
        let mut g = complete(3);
        g.add_edge(NodeId(0), NodeId(1), 4).unwrap();
        assert_eq!(lambda_distance::<f64>(&g, &complete(3)).unwrap(), 0.0);
    }

    #[test]
    fn ties_order_by_signed_value() {
        let s = Spectrum::from_unsorted(vec![-2.0, 1.0, 2.0, -1.0, 0.0]);
        assert_eq!(s.values, vec![2.0, -2.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn f32_agrees_with_f64() {
        let g = cycle(7);
        let a = adjacency_spectrum::<f32>(&g).unwrap();
        let b = adjacency_spectrum::<f64>(&g).unwrap();
        assert!(a
            .values
            .iter()
            .zip(&b.values)
            .all(|(x, y)| (*x as f64 - y).abs() < 1e-4));
    }

    #[test]
    fn lanczos_finds_dominant_values() {
        // disjoint union of a 40-cycle and K6 sharing no nodes
        let mut edges: Vec<(u32, u32)> = (0..40).map(|i| (i, (i + 1) % 40)).collect();
        edges.extend((40..46).flat_map(|i| (i + 1..46).map(move |j| (i, j))));
        let g = Multigraph::from_edges(edges).unwrap();
        let dense = adjacency_spectrum::<f64>(&g).unwrap();
        let top = lanczos_top_k::<f64>(&simple_adjacency(&g), 1, 46).unwrap();
        assert!((top[0] - dense.values[0]).abs() < 1e-8);
        assert!((top[0] - 5.0).abs() < 1e-8);
    }

    #[test]
    fn empty_graph_errors() {
        assert_eq!(
            adjacency_spectrum::<f64>(&Multigraph::new()).unwrap_err(),
            SpectrumError::EmptyGraph
        );
    }
}
