mod common;

use std::collections::BTreeSet;

use cnrg::clustering::louvain_recursive;
use cnrg::datasets;
use cnrg::extraction::{make_rule, mdl_score};
use cnrg::mdl::{compression_ratio, graph_dl};
use cnrg::{
    extract_graph, generate, replay, ClusteringStrategy, ExtractionParams, Multigraph, NodeId,
    NodeLabel, ScoringPolicy,
};

fn params(policy: ScoringPolicy, seed: u64) -> ExtractionParams {
    ExtractionParams {
        strategy: ClusteringStrategy::LouvainRecursive,
        policy,
        mu: 4,
        seed,
    }
}

fn gamma_bits(n: u64) -> f64 {
    common::gamma_codeword(n).len() as f64
}

/// Description length by walking the full upper triangle of the adjacency
/// matrix, one γ codeword per entry.
fn graph_dl_by_matrix(g: &Multigraph) -> f64 {
    let ids: Vec<NodeId> = g.nodes().collect();
    let n = ids.len() as f64;
    let sizes: BTreeSet<u32> = g
        .labeled_nodes()
        .filter_map(|(_, l)| l.nonterminal_size())
        .collect();
    let lg_labels = ((2 + sizes.len()) as f64).log2();
    let mut entries = 0.0;
    let mut nonzero = 0u64;
    for (i, u) in ids.iter().enumerate() {
        for v in &ids[i..] {
            let m = g.multiplicity(*u, *v) as u64;
            entries += gamma_bits(m + 1);
            nonzero += (m > 0) as u64;
        }
    }
    let lg_edges = if nonzero == 0 {
        0.0
    } else {
        (nonzero as f64).log2()
    };
    n.log2() + n * lg_labels + lg_edges + lg_labels * entries
}

fn rule_dl_by_hand(
    rhs: &Multigraph,
    omega: u32,
    frequency: u32,
    degrees: impl Iterator<Item = u32>,
) -> f64 {
    gamma_bits(omega as u64 + 1)
        + gamma_bits(frequency as u64)
        + graph_dl_by_matrix(rhs)
        + degrees.map(|b| gamma_bits(b as u64 + 1)).sum::<f64>()
}

#[test]
fn karate_description_length_matches_matrix_walk() {
    let g = datasets::karate().graph;
    let fast = graph_dl::<f64>(&g).unwrap().bits();
    assert!((fast - graph_dl_by_matrix(&g)).abs() < 1e-9);
}

#[test]
fn karate_replays_for_every_policy() {
    let g = datasets::karate().graph;
    for policy in ScoringPolicy::ALL {
        for seed in 0..3 {
            let grammar = extract_graph(&g, params(policy, seed)).unwrap();
            assert_eq!(replay(&grammar).unwrap(), g, "{policy} seed {seed}");
            assert!(
                compression_ratio::<f64>(&grammar, &g).unwrap() < 1.0,
                "{policy} seed {seed}"
            );
        }
    }
}

#[test]
fn louvain_separates_the_two_karate_leaders() {
    let list = datasets::karate();
    let handle = |external: u64| {
        NodeId(
            list.external_ids
                .iter()
                .position(|x| *x == external)
                .unwrap() as u32,
        )
    };
    let (instructor, administrator) = (handle(0), handle(33));
    for seed in 0..5 {
        let d = louvain_recursive(&list.graph, seed).unwrap();
        let top = d.children(d.root());
        assert!(top.len() >= 2);
        let side = |v: NodeId| {
            top.iter()
                .position(|c| d.leaf_set(*c).contains(&v))
                .unwrap()
        };
        assert_ne!(side(instructor), side(administrator), "seed {seed}");
    }
}

#[test]
fn local_mdl_score_is_rule_plus_contracted_graph() {
    // two triangles sharing node 2, plus a pendant path
    let g = Multigraph::from_edges([
        (0, 1),
        (1, 2),
        (2, 0),
        (2, 3),
        (3, 4),
        (4, 2),
        (4, 5),
        (5, 6),
    ])
    .unwrap();
    let members: BTreeSet<NodeId> = [0, 1, 2].map(NodeId).into();
    let (rule, _) = make_rule(&g, &members).unwrap();
    assert_eq!(rule.omega, 2);
    let (contracted, _) = g.contract(&members, NodeLabel::Nonterminal(2)).unwrap();
    let expected = rule_dl_by_hand(&rule.rhs, 2, 1, rule.boundary.values().copied())
        + graph_dl_by_matrix(&contracted);
    let score = mdl_score(&g, &rule, &[&members]).unwrap();
    assert!((score - expected).abs() < 1e-9, "{score} vs {expected}");
}

#[test]
fn isomorphic_components_share_one_rule() {
    let triangle = |b: u32| [(b, b + 1), (b + 1, b + 2), (b + 2, b)];
    let g = Multigraph::from_edges(triangle(0).into_iter().chain(triangle(3))).unwrap();
    for policy in ScoringPolicy::ALL {
        // μ = 3 so the half-contracted root never outranks the second triangle
        let grammar = extract_graph(
            &g,
            ExtractionParams {
                mu: 3,
                ..params(policy, 0)
            },
        )
        .unwrap();
        assert_eq!(replay(&grammar).unwrap(), g);
        // random selection may split a triangle, so only the size-aware
        // policies are guaranteed to reuse the rule
        if policy == ScoringPolicy::Random {
            continue;
        }
        assert!(
            grammar
                .rules
                .iter()
                .any(|r| r.frequency == 2 && r.size() == 3),
            "{policy}"
        );
        assert!(
            grammar.rule_count() < grammar.derivation.steps.len(),
            "{policy}"
        );
    }
}

#[test]
fn karate_generation_is_seeded() {
    let g = datasets::karate().graph;
    let grammar = extract_graph(&g, params(ScoringPolicy::GreedyLevelDl, 0)).unwrap();
    let a = generate(&grammar, 11).unwrap();
    assert_eq!(a, generate(&grammar, 11).unwrap());
    assert_eq!(a.nonterminal_count(), 0);
    let distinct: BTreeSet<Vec<(NodeId, NodeId, u32)>> = (0..10)
        .map(|s| generate(&grammar, s).unwrap().edges().collect())
        .collect();
    assert!(distinct.len() > 1);
}

#[test]
fn graphlet_census_matches_brute_force_on_karate() {
    let g = datasets::karate().graph;
    assert_eq!(
        cnrg::metrics::graphlet_census(&g).as_array(),
        common::brute_census(&g)
    );
}
