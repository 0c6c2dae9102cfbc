//! Grammar data model and its JSON document format.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::ClusteringStrategy;
use crate::extraction::ScoringPolicy;
use crate::multigraph::{
    canonical_form, BoundarySpec, CanonicalKey, GraphError, Multigraph, NodeId, NodeLabel,
    DEFAULT_CANONICAL_CAP,
};

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("malformed grammar document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule {rule}: {reason}")]
    InvalidRule { rule: usize, reason: String },
    #[error("rules {first} and {second} are isomorphic")]
    DuplicateRule { first: usize, second: usize },
    #[error("derivation step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("unknown {what} {value:?}")]
    UnknownName { what: &'static str, value: String },
}

/// Extraction settings stored with a grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractionParams {
    pub strategy: ClusteringStrategy,
    pub policy: ScoringPolicy,
    pub mu: usize,
    pub seed: u64,
}

/// Production `X → (R, f)`.
///
/// RHS nodes carry ids `0..|V_R|` in canonical order, so two rules with equal
/// keys have identical RHS graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub omega: u32,
    pub frequency: u32,
    pub rhs: Multigraph,
    pub boundary: BoundarySpec,
    pub key: CanonicalKey,
    /// Produced by contracting the dendrogram root (LHS is the start symbol).
    pub start: bool,
    /// Produced by a forced candidate larger than μ.
    pub fallback: bool,
}

impl Rule {
    /// Builds a rule from an RHS with arbitrary node ids, renumbering nodes
    /// into canonical order. Returns the rule and, for each new RHS index,
    /// the id the node had in `rhs`.
    pub fn from_occurrence(
        rhs: &Multigraph,
        boundary: &BoundarySpec,
    ) -> Result<(Rule, Vec<NodeId>), GraphError> {
        let (key, order) = rule_key(rhs, boundary)?;
        let position: BTreeMap<NodeId, NodeId> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, NodeId(i as u32)))
            .collect();
        let mut local = Multigraph::new();
        let mut local_boundary = BoundarySpec::new();
        for (i, v) in order.iter().enumerate() {
            local.insert_node(NodeId(i as u32), rhs.label(*v).unwrap())?;
            local_boundary.insert(NodeId(i as u32), boundary.get(v).copied().unwrap_or(0));
        }
        for (u, v, m) in rhs.edges() {
            local.add_edge(position[&u], position[&v], m)?;
        }
        let omega = local_boundary.values().sum();
        Ok((
            Rule {
                omega,
                frequency: 1,
                rhs: local,
                boundary: local_boundary,
                key,
                start: false,
                fallback: false,
            },
            order,
        ))
    }

    pub fn size(&self) -> usize {
        self.rhs.node_count()
    }

    pub fn b_deg(&self, local: NodeId) -> u32 {
        self.boundary.get(&local).copied().unwrap_or(0)
    }
}

/// Key used for rule deduplication. Graphs above the canonical-form cap get
/// an order-dependent literal key tagged so it never equals a canonical one.
pub fn rule_key(
    rhs: &Multigraph,
    boundary: &BoundarySpec,
) -> Result<(CanonicalKey, Vec<NodeId>), GraphError> {
    if rhs.node_count() <= DEFAULT_CANONICAL_CAP {
        let form = canonical_form(rhs, boundary, DEFAULT_CANONICAL_CAP)?;
        return Ok((form.key, form.order));
    }
    let order: Vec<NodeId> = rhs.nodes().collect();
    let mut literal = vec![u32::MAX, order.len() as u32];
    for v in &order {
        literal.push(match rhs.label(*v).unwrap() {
            NodeLabel::Terminal => 0,
            NodeLabel::Nonterminal(w) => w + 1,
        });
        literal.push(boundary.get(v).copied().unwrap_or(0));
    }
    for (i, u) in order.iter().enumerate() {
        for v in &order[..i] {
            literal.push(rhs.multiplicity(*u, *v));
        }
    }
    Ok((CanonicalKey::from_literal(literal), order))
}

/// One broken edge reattached during replay: RHS node index, outside
/// neighbour id, multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub node: u32,
    pub neighbor: NodeId,
    pub mult: u32,
}

/// One contraction: `nonterminal` replaced the nodes `nodes` (indexed like
/// the rule's RHS) of the working graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub nonterminal: NodeId,
    pub rule: usize,
    pub nodes: Vec<NodeId>,
    pub wiring: Vec<Wire>,
}

/// Contraction log in extraction order; replaying it backwards inverts
/// extraction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DerivationRecord {
    pub steps: Vec<DerivationStep>,
}

/// CNRG: distinct rules with frequencies, the derivation that produced them
/// and the extraction settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub params: ExtractionParams,
    pub rules: Vec<Rule>,
    pub derivation: DerivationRecord,
    index: HashMap<CanonicalKey, usize>,
}

impl Grammar {
    pub fn new(params: ExtractionParams) -> Self {
        Grammar {
            params,
            rules: Vec::new(),
            derivation: DerivationRecord::default(),
            index: HashMap::new(),
        }
    }

    pub fn find(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Adds `rule` or bumps the frequency of its isomorphic twin.
    pub fn insert(&mut self, rule: Rule) -> usize {
        if let Some(&i) = self.index.get(&rule.key) {
            let existing = &mut self.rules[i];
            existing.frequency += rule.frequency;
            existing.start |= rule.start;
            existing.fallback |= rule.fallback;
            return i;
        }
        let i = self.rules.len();
        self.index.insert(rule.key.clone(), i);
        self.rules.push(rule);
        i
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn total_frequency(&self) -> u64 {
        self.rules.iter().map(|r| r.frequency as u64).sum()
    }

    pub fn rules_with_omega(&self, omega: u32) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.omega == omega)
    }

    /// Terminal nodes of the graph the derivation was recorded from.
    pub fn source_node_count(&self) -> usize {
        self.derivation
            .steps
            .iter()
            .map(|s| {
                self.rules[s.rule]
                    .rhs
                    .labeled_nodes()
                    .filter(|(_, l)| l.is_terminal())
                    .count()
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&GrammarDoc::from(self)).expect("serialisable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Grammar, GrammarError> {
        let doc: GrammarDoc = serde_json::from_str(text)?;
        doc.into_grammar()
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    strategy: String,
    policy: String,
    mu: usize,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NodeKind {
    Terminal,
    Nonterminal,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: u32,
    kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nt_size: Option<u32>,
    b_deg: u32,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    u: u32,
    v: u32,
    mult: u32,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    omega: u32,
    frequency: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    start: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    fallback: bool,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct GrammarDoc {
    params: ParamsDoc,
    rules: Vec<RuleDoc>,
    #[serde(default)]
    derivation: DerivationRecord,
}

impl From<&Grammar> for GrammarDoc {
    fn from(g: &Grammar) -> Self {
        let rules = g
            .rules
            .iter()
            .map(|r| RuleDoc {
                omega: r.omega,
                frequency: r.frequency,
                start: r.start,
                fallback: r.fallback,
                nodes: r
                    .rhs
                    .labeled_nodes()
                    .map(|(v, l)| NodeDoc {
                        id: v.0,
                        kind: if l.is_terminal() {
                            NodeKind::Terminal
                        } else {
                            NodeKind::Nonterminal
                        },
                        nt_size: l.nonterminal_size(),
                        b_deg: r.b_deg(v),
                    })
                    .collect(),
                edges: r
                    .rhs
                    .edges()
                    .map(|(u, v, m)| EdgeDoc {
                        u: u.0,
                        v: v.0,
                        mult: m,
                    })
                    .collect(),
            })
            .collect();
        GrammarDoc {
            params: ParamsDoc {
                strategy: g.params.strategy.name().to_string(),
                policy: g.params.policy.name().to_string(),
                mu: g.params.mu,
                seed: g.params.seed,
            },
            rules,
            derivation: g.derivation.clone(),
        }
    }
}

impl GrammarDoc {
    fn into_grammar(self) -> Result<Grammar, GrammarError> {
        let strategy = self
            .params
            .strategy
            .parse::<ClusteringStrategy>()
            .map_err(|_| GrammarError::UnknownName {
                what: "clustering strategy",
                value: self.params.strategy.clone(),
            })?;
        let policy =
            self.params
                .policy
                .parse::<ScoringPolicy>()
                .map_err(|_| GrammarError::UnknownName {
                    what: "scoring policy",
                    value: self.params.policy.clone(),
                })?;
        let mut grammar = Grammar::new(ExtractionParams {
            strategy,
            policy,
            mu: self.params.mu,
            seed: self.params.seed,
        });
        for (i, doc) in self.rules.into_iter().enumerate() {
            let rule = doc
                .into_rule()
                .map_err(|reason| GrammarError::InvalidRule { rule: i, reason })?;
            if let Some(first) = grammar.find(&rule.key) {
                return Err(GrammarError::DuplicateRule { first, second: i });
            }
            grammar.insert(rule);
        }
        for (s, step) in self.derivation.steps.iter().enumerate() {
            let invalid = |reason: String| GrammarError::InvalidStep { step: s, reason };
            let rule = grammar
                .rules
                .get(step.rule)
                .ok_or_else(|| invalid(format!("unknown rule {}", step.rule)))?;
            if step.nodes.len() != rule.size() {
                return Err(invalid(format!(
                    "{} node ids for a rule of size {}",
                    step.nodes.len(),
                    rule.size()
                )));
            }
            if let Some(w) = step.wiring.iter().find(|w| w.node as usize >= rule.size()) {
                return Err(invalid(format!("wire to unknown rule node {}", w.node)));
            }
        }
        grammar.derivation = self.derivation;
        Ok(grammar)
    }
}

impl RuleDoc {
    fn into_rule(self) -> Result<Rule, String> {
        let mut rhs = Multigraph::new();
        let mut boundary = BoundarySpec::new();
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id) {
                return Err(format!("duplicate node id {}", n.id));
            }
            let label = match (&n.kind, n.nt_size) {
                (NodeKind::Terminal, None) => NodeLabel::Terminal,
                (NodeKind::Nonterminal, Some(w)) => NodeLabel::Nonterminal(w),
                (NodeKind::Terminal, Some(_)) => {
                    return Err(format!("terminal node {} has nt_size", n.id))
                }
                (NodeKind::Nonterminal, None) => {
                    return Err(format!("nonterminal node {} lacks nt_size", n.id))
                }
            };
            rhs.insert_node(NodeId(n.id), label)
                .map_err(|e| e.to_string())?;
            boundary.insert(NodeId(n.id), n.b_deg);
        }
        if rhs.is_empty() {
            return Err("empty right-hand side".into());
        }
        if seen.iter().copied().ne(0..seen.len() as u32) {
            return Err("node ids must be 0..n".into());
        }
        for e in &self.edges {
            if rhs.multiplicity(NodeId(e.u), NodeId(e.v)) != 0 {
                return Err(format!("edge {}-{} listed twice", e.u, e.v));
            }
            rhs.add_edge(NodeId(e.u), NodeId(e.v), e.mult)
                .map_err(|err| err.to_string())?;
        }
        let total: u32 = boundary.values().sum();
        if total != self.omega {
            return Err(format!(
                "boundary degrees sum to {} but omega is {}",
                total, self.omega
            ));
        }
        if self.frequency == 0 {
            return Err("frequency must be positive".into());
        }
        let (key, _) = rule_key(&rhs, &boundary).map_err(|e| e.to_string())?;
        Ok(Rule {
            omega: self.omega,
            frequency: self.frequency,
            rhs,
            boundary,
            key,
            start: self.start,
            fallback: self.fallback,
        })
    }
}
