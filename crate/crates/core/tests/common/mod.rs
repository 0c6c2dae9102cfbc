#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cnrg::{Multigraph, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: u32, p: f64) -> Multigraph {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..order.len() {
        let parent = order[rng.gen_range(0..i)];
        let (a, b) = (order[i].min(parent), order[i].max(parent));
        edges.insert((a, b));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let mut g = Multigraph::with_terminals(n as usize);
    for (u, v) in edges {
        g.add_edge(NodeId(u), NodeId(v), 1).unwrap();
    }
    g
}

/// Erdős–Rényi graph on `0..n`; may be disconnected or edgeless.
pub fn gnp(rng: &mut ChaCha8Rng, n: u32, p: f64) -> Multigraph {
    let mut g = Multigraph::with_terminals(n as usize);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(NodeId(u), NodeId(v), 1).unwrap();
            }
        }
    }
    g
}

/// Induced-graphlet counts by classifying every 2-, 3- and 4-subset, in the
/// order edge, triangle, wedge, K4, diamond, tailed triangle, C4, star, P4.
pub fn brute_census(g: &Multigraph) -> [u64; 9] {
    let ids: Vec<NodeId> = g.nodes().collect();
    let n = ids.len();
    let adj = |a: usize, b: usize| g.multiplicity(ids[a], ids[b]) > 0;
    let mut out = [0u64; 9];
    for a in 0..n {
        for b in a + 1..n {
            if adj(a, b) {
                out[0] += 1;
            }
            for c in b + 1..n {
                let e = [adj(a, b), adj(a, c), adj(b, c)]
                    .iter()
                    .filter(|x| **x)
                    .count();
                match e {
                    3 => out[1] += 1,
                    2 => out[2] += 1,
                    _ => {}
                }
                for d in c + 1..n {
                    let set = [a, b, c, d];
                    let mut degree = [0usize; 4];
                    let mut edges = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if adj(set[i], set[j]) {
                                degree[i] += 1;
                                degree[j] += 1;
                                edges += 1;
                            }
                        }
                    }
                    if !connected4(&set, &adj) {
                        continue;
                    }
                    degree.sort();
                    let slot = match (edges, degree) {
                        (6, _) => 3,
                        (5, _) => 4,
                        (4, [1, 2, 2, 3]) => 5,
                        (4, [2, 2, 2, 2]) => 6,
                        (3, [1, 1, 1, 3]) => 7,
                        (3, [1, 1, 2, 2]) => 8,
                        other => panic!("unexpected connected 4-subset {other:?}"),
                    };
                    out[slot] += 1;
                }
            }
        }
    }
    out
}

fn connected4(set: &[usize; 4], adj: &impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = [true, false, false, false];
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..4 {
            if !seen[j] && adj(set[i], set[j]) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|s| *s)
}

/// Edge multiset keyed by endpoint ids.
pub fn edge_multiset(g: &Multigraph) -> BTreeMap<(NodeId, NodeId), u32> {
    g.edges().map(|(u, v, m)| ((u, v), m)).collect()
}

/// Exhaustive isomorphism test for small labeled multigraphs.
pub fn isomorphic_brute(a: &Multigraph, b: &Multigraph) -> bool {
    let va: Vec<NodeId> = a.nodes().collect();
    let vb: Vec<NodeId> = b.nodes().collect();
    if va.len() != vb.len() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut perm: Vec<usize> = (0..vb.len()).collect();
    permutations(&mut perm, 0, &mut |p| {
        va.iter()
            .enumerate()
            .all(|(i, u)| a.label(*u) == b.label(vb[p[i]]))
            && (0..va.len()).all(|i| {
                (0..i).all(|j| a.multiplicity(va[i], va[j]) == b.multiplicity(vb[p[i]], vb[p[j]]))
            })
    })
}

fn permutations(p: &mut Vec<usize>, k: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return check(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, check) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// γ codeword: ⌊lg n⌋ zeros, then n in binary.
pub fn gamma_codeword(n: u64) -> String {
    let binary = format!("{n:b}");
    "0".repeat(binary.len() - 1) + &binary
}

pub fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}
