//! Graph generation from a grammar: stochastic rewriting from the start
//! symbol, and exact replay of a recorded derivation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::grammar::{DerivationRecord, Grammar, Rule};
use crate::multigraph::{GraphError, Multigraph, NodeId, NodeLabel};
use crate::rng::{substream_indexed, Rng, Stream};

pub const DEFAULT_MAX_RETRIES: usize = 100;
pub const DEFAULT_SIZE_MULTIPLIER: usize = 10;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("grammar has no rules")]
    EmptyGrammar,
    #[error("no rule has a left-hand side of size {omega}")]
    Stuck { omega: u32 },
    #[error("nonterminal of size {omega} broke {broken} edges")]
    WiringMismatch { omega: u32, broken: u32 },
    #[error("every attempt exceeded {max_size} nodes ({attempts} attempts)")]
    SizeCap { max_size: usize, attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("derivation record is empty")]
    EmptyRecord,
    #[error("step {step}: no rule with index {rule}")]
    MissingRule { step: usize, rule: usize },
    #[error("step {step}: nonterminal {node} is not in the graph")]
    MissingNonterminal { step: usize, node: NodeId },
    #[error("step {step}: {reason}")]
    Inconsistent { step: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationConfig {
    /// Attempts whose node count passes this bound are discarded.
    pub max_size: usize,
    pub max_retries: usize,
}

impl GenerationConfig {
    /// Cap of ten times the node count of the graph `grammar` came from.
    pub fn for_grammar(grammar: &Grammar) -> Self {
        GenerationConfig {
            max_size: DEFAULT_SIZE_MULTIPLIER * grammar.source_node_count().max(1),
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

/// Stochastic generation with the default size cap.
pub fn generate(grammar: &Grammar, seed: u64) -> Result<Multigraph, GenerationError> {
    generate_with(grammar, seed, &GenerationConfig::for_grammar(grammar))
}

/// Rewrites from a single ⟨0⟩ nonterminal until only terminals remain.
/// The output is renumbered to `0..n`.
pub fn generate_with(
    grammar: &Grammar,
    seed: u64,
    config: &GenerationConfig,
) -> Result<Multigraph, GenerationError> {
    if grammar.rules.is_empty() {
        return Err(GenerationError::EmptyGrammar);
    }
    for attempt in 0..=config.max_retries {
        let mut rng = substream_indexed(seed, Stream::Generation, attempt as u64);
        if let Some(g) = attempt_generation(grammar, config.max_size, &mut rng)? {
            if attempt > 0 {
                log::debug!("generation succeeded on attempt {}", attempt + 1);
            }
            return Ok(g.compacted());
        }
    }
    Err(GenerationError::SizeCap {
        max_size: config.max_size,
        attempts: config.max_retries + 1,
    })
}

fn attempt_generation(
    grammar: &Grammar,
    max_size: usize,
    rng: &mut Rng,
) -> Result<Option<Multigraph>, GenerationError> {
    let mut by_omega: BTreeMap<u32, (Vec<&Rule>, WeightedIndex<u32>)> = BTreeMap::new();
    let mut g = Multigraph::new();
    let mut pending = vec![g.add_node(NodeLabel::Nonterminal(0))];
    while !pending.is_empty() {
        let x = pending.swap_remove(rng.gen_range(0..pending.len()));
        let omega = g.label(x).and_then(|l| l.nonterminal_size()).unwrap();
        let (rules, weights) = match by_omega.entry(omega) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let rules: Vec<&Rule> = grammar.rules_with_omega(omega).map(|(_, r)| r).collect();
                if rules.is_empty() {
                    return Err(GenerationError::Stuck { omega });
                }
                let weights = WeightedIndex::new(rules.iter().map(|r| r.frequency))
                    .expect("frequencies are positive");
                e.insert((rules, weights))
            }
        };
        let rule = rules[weights.sample(rng)];

        let broken: Vec<NodeId> = g
            .remove_node(x)?
            .into_iter()
            .flat_map(|(w, m)| std::iter::repeat_n(w, m as usize))
            .collect();
        if broken.len() as u32 != omega || rule.omega != omega {
            return Err(GenerationError::WiringMismatch {
                omega,
                broken: broken.len() as u32,
            });
        }
        let fresh: Vec<NodeId> = rule
            .rhs
            .labeled_nodes()
            .map(|(_, label)| {
                let id = g.add_node(label);
                if !label.is_terminal() {
                    pending.push(id);
                }
                id
            })
            .collect();
        for (u, v, m) in rule.rhs.edges() {
            g.add_edge(fresh[u.0 as usize], fresh[v.0 as usize], m)?;
        }
        let mut slots: Vec<NodeId> = rule
            .boundary
            .iter()
            .flat_map(|(local, b)| std::iter::repeat_n(fresh[local.0 as usize], *b as usize))
            .collect();
        slots.shuffle(rng);
        for (w, slot) in broken.into_iter().zip(slots) {
            g.add_edge(slot, w, 1)?;
        }
        if g.node_count() > max_size {
            return Ok(None);
        }
    }
    Ok(Some(g))
}

/// Replays the grammar's own derivation record.
pub fn replay(grammar: &Grammar) -> Result<Multigraph, ReplayError> {
    replay_record(grammar, &grammar.derivation)
}

/// Undoes the recorded contractions last to first, restoring the original
/// node ids.
pub fn replay_record(
    grammar: &Grammar,
    record: &DerivationRecord,
) -> Result<Multigraph, ReplayError> {
    let last = record.steps.last().ok_or(ReplayError::EmptyRecord)?;
    let mut g = Multigraph::new();
    g.insert_node(last.nonterminal, NodeLabel::Nonterminal(0))?;
    for (step, s) in record.steps.iter().enumerate().rev() {
        let rule = grammar
            .rules
            .get(s.rule)
            .ok_or(ReplayError::MissingRule { step, rule: s.rule })?;
        let inconsistent = |reason: String| ReplayError::Inconsistent { step, reason };
        match g.label(s.nonterminal) {
            Some(NodeLabel::Nonterminal(w)) if w == rule.omega => {}
            Some(label) => {
                return Err(inconsistent(format!(
                    "node {} is {:?} but rule {} has size {}",
                    s.nonterminal, label, s.rule, rule.omega
                )))
            }
            None => {
                return Err(ReplayError::MissingNonterminal {
                    step,
                    node: s.nonterminal,
                })
            }
        }
        if s.nodes.len() != rule.size() {
            return Err(inconsistent(format!(
                "{} nodes recorded for a rule with {}",
                s.nodes.len(),
                rule.size()
            )));
        }
        let mut broken = g.remove_node(s.nonterminal)?;
        for (i, id) in s.nodes.iter().enumerate() {
            let label = rule.rhs.label(NodeId(i as u32)).unwrap();
            g.insert_node(*id, label)?;
        }
        for (u, v, m) in rule.rhs.edges() {
            g.add_edge(s.nodes[u.0 as usize], s.nodes[v.0 as usize], m)?;
        }
        let mut used = vec![0u32; s.nodes.len()];
        for wire in &s.wiring {
            let local = wire.node as usize;
            if local >= s.nodes.len() {
                return Err(inconsistent(format!(
                    "wire to RHS node {local} out of range"
                )));
            }
            let remaining = broken.get_mut(&wire.neighbor).filter(|m| **m >= wire.mult);
            let Some(remaining) = remaining else {
                return Err(inconsistent(format!(
                    "no broken edge to {} left",
                    wire.neighbor
                )));
            };
            *remaining -= wire.mult;
            used[local] += wire.mult;
            g.add_edge(s.nodes[local], wire.neighbor, wire.mult)?;
        }
        if broken.values().any(|m| *m > 0) {
            return Err(inconsistent("broken edges left unwired".into()));
        }
        for (i, u) in used.iter().enumerate() {
            let b = rule.b_deg(NodeId(i as u32));
            if *u != b {
                return Err(inconsistent(format!(
                    "RHS node {i} wired {u} times, boundary degree {b}"
                )));
            }
        }
    }
    if g.nonterminal_count() > 0 {
        return Err(ReplayError::Inconsistent {
            step: 0,
            reason: "nonterminals remain after replay".into(),
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusteringStrategy;
    use crate::extraction::{extract_graph, ScoringPolicy};
    use crate::grammar::ExtractionParams;

    fn params(policy: ScoringPolicy) -> ExtractionParams {
        ExtractionParams {
            strategy: ClusteringStrategy::LouvainRecursive,
            policy,
            mu: 4,
            seed: 3,
        }
    }

    fn barbell() -> Multigraph {
        Multigraph::from_edges([
            (0, 1),
            (1, 2),
            (0, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (3, 5),
            (5, 6),
            (6, 0),
        ])
        .unwrap()
    }

    #[test]
    fn single_edge_grammar_always_gives_the_edge() {
        let g = Multigraph::from_edges([(0, 1)]).unwrap();
        let grammar = extract_graph(&g, params(ScoringPolicy::GreedyLevelDl)).unwrap();
        for seed in 0..5 {
            let h = generate(&grammar, seed).unwrap();
            assert_eq!(h, g);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let grammar = extract_graph(&barbell(), params(ScoringPolicy::LocalMdl)).unwrap();
        let a = generate(&grammar, 17).unwrap();
        let b = generate(&grammar, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.nonterminal_count(), 0);
    }

    #[test]
    fn replay_restores_the_input() {
        let g = barbell();
        for policy in ScoringPolicy::ALL {
            let grammar = extract_graph(&g, params(policy)).unwrap();
            assert_eq!(replay(&grammar).unwrap(), g, "{policy}");
        }
    }

    #[test]
    fn truncated_record_is_rejected() {
        let grammar = extract_graph(&barbell(), params(ScoringPolicy::GreedyLevel)).unwrap();
        let mut record = grammar.derivation.clone();
        record.steps.remove(0);
        assert!(replay_record(&grammar, &record).is_err());
        assert!(matches!(
            replay_record(&grammar, &DerivationRecord::default()),
            Err(ReplayError::EmptyRecord)
        ));
    }

    #[test]
    fn size_cap_is_enforced() {
        let grammar = extract_graph(&barbell(), params(ScoringPolicy::GreedyLevelDl)).unwrap();
        let config = GenerationConfig {
            max_size: 1,
            max_retries: 3,
        };
        assert!(matches!(
            generate_with(&grammar, 0, &config),
            Err(GenerationError::SizeCap { attempts: 4, .. })
        ));
    }

    #[test]
    fn boundary_degrees_are_respected() {
        let grammar = extract_graph(&barbell(), params(ScoringPolicy::GreedyDl)).unwrap();
        for seed in 0..20 {
            let h = generate(&grammar, seed).unwrap();
            assert_eq!(h.nonterminal_count(), 0);
            assert!(h.node_count() <= GenerationConfig::for_grammar(&grammar).max_size);
        }
    }
}
