//! Grammar extraction: repeatedly pick a dendrogram subtree, turn it into a
//! rule, contract it in the working graph and shrink the dendrogram.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use thiserror::Error;

use crate::clustering::{build_dendrogram, ClusteringError, Dendrogram, TreeIndex};
use crate::grammar::{DerivationStep, ExtractionParams, Grammar, Rule, Wire};
use crate::mdl::{lhs_dl, rule_dl, DlStats, MdlError};
use crate::multigraph::{CanonicalKey, GraphError, Multigraph, NodeId, NodeLabel};
use crate::rng::{substream, Rng, Stream};

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("mu must be at least 2, got {0}")]
    InvalidMu(usize),
    #[error("dendrogram leaves do not match the graph")]
    DendrogramMismatch,
    #[error("extraction made no progress after {iterations} iterations on {nodes} nodes")]
    NoProgress { iterations: usize, nodes: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mdl(#[from] MdlError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
}

/// How the next subtree to contract is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoringPolicy {
    Random,
    GreedyDl,
    GreedyLevel,
    GreedyLevelDl,
    LocalMdl,
    GlobalMdl,
}

impl ScoringPolicy {
    pub const ALL: [ScoringPolicy; 6] = [
        ScoringPolicy::Random,
        ScoringPolicy::GreedyDl,
        ScoringPolicy::GreedyLevel,
        ScoringPolicy::GreedyLevelDl,
        ScoringPolicy::LocalMdl,
        ScoringPolicy::GlobalMdl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScoringPolicy::Random => "random",
            ScoringPolicy::GreedyDl => "greedy-dl",
            ScoringPolicy::GreedyLevel => "greedy-level",
            ScoringPolicy::GreedyLevelDl => "greedy-level-dl",
            ScoringPolicy::LocalMdl => "local-mdl",
            ScoringPolicy::GlobalMdl => "global-mdl",
        }
    }

    fn is_mdl(&self) -> bool {
        matches!(self, ScoringPolicy::LocalMdl | ScoringPolicy::GlobalMdl)
    }
}

impl fmt::Display for ScoringPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown scoring policy {s:?}"))
    }
}

/// Internal dendrogram nodes eligible for contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidates {
    pub nodes: Vec<TreeIndex>,
    /// No internal node had at most μ leaves; `nodes` holds the smallest one.
    pub forced: bool,
}

/// Internal nodes with at most `mu` leaves, in preorder. Falls back to the
/// internal node with the fewest leaves when none qualifies.
pub fn enumerate_candidates(d: &Dendrogram, mu: usize) -> Candidates {
    let internal = d.internal_nodes();
    let nodes: Vec<TreeIndex> = internal
        .iter()
        .copied()
        .filter(|i| d.leaf_count(*i) <= mu)
        .collect();
    if !nodes.is_empty() || internal.is_empty() {
        return Candidates {
            nodes,
            forced: false,
        };
    }
    let smallest = internal
        .into_iter()
        .min_by_key(|i| (d.leaf_count(*i), d.leaves(*i).into_iter().min()))
        .unwrap();
    Candidates {
        nodes: vec![smallest],
        forced: true,
    }
}

/// Rule for contracting `members` of `g` (frequency 1), together with the
/// working-graph id of each RHS node.
pub fn make_rule(
    g: &Multigraph,
    members: &BTreeSet<NodeId>,
) -> Result<(Rule, Vec<NodeId>), GraphError> {
    let rhs = g.induced_subgraph(members)?;
    let (_, boundary) = g.boundary(members)?;
    Rule::from_occurrence(&rhs, &boundary)
}

/// `|V_η| − μ`. Candidates are ranked by the absolute value, so the ones
/// whose size is nearest μ come first.
pub fn simple_score(leaf_count: usize, mu: usize) -> i64 {
    leaf_count as i64 - mu as i64
}

/// `DL(r) + DL(H after contracting each group)` for a candidate rule `r`
/// whose occurrences in `g` are `groups`.
pub fn mdl_score(
    g: &Multigraph,
    rule: &Rule,
    groups: &[&BTreeSet<NodeId>],
) -> Result<f64, MdlError> {
    mdl_score_with(&DlStats::of(g), g, rule_dl::<f64>(rule)?.bits(), groups)
}

fn mdl_score_with(
    stats: &DlStats,
    g: &Multigraph,
    rule_bits: f64,
    groups: &[&BTreeSet<NodeId>],
) -> Result<f64, MdlError> {
    Ok(rule_bits + stats.after_contracting(g, groups).bits::<f64>()?.bits())
}

/// Sort key of a candidate; smaller is better.
#[derive(Clone, Debug, PartialEq)]
pub struct Score {
    pub value: f64,
    /// Policy-specific secondary key.
    pub tie: f64,
    pub depth: usize,
    pub min_node: NodeId,
}

impl Score {
    fn cmp_key(&self, other: &Score, policy: ScoringPolicy) -> Ordering {
        let primary = self.value.total_cmp(&other.value);
        let level = self.depth.cmp(&other.depth);
        let tie = self.tie.total_cmp(&other.tie);
        let ordered = match policy {
            ScoringPolicy::GreedyLevel => primary.then(level),
            ScoringPolicy::GreedyLevelDl => primary.then(level).then(tie),
            _ => primary.then(tie),
        };
        ordered.then(level).then(self.min_node.cmp(&other.min_node))
    }
}

#[derive(Clone, Debug)]
struct CandidateRule {
    members: BTreeSet<NodeId>,
    rule: Rule,
    order: Vec<NodeId>,
    dl: f64,
}

/// Mutable extraction state: working graph, shrinking dendrogram, grammar
/// so far and rules cached per candidate.
struct Extractor {
    graph: Multigraph,
    dendrogram: Dendrogram,
    grammar: Grammar,
    mu: usize,
    policy: ScoringPolicy,
    rng: Rng,
    cache: HashMap<TreeIndex, CandidateRule>,
}

impl Extractor {
    fn candidate_rule(&mut self, i: TreeIndex) -> Result<&CandidateRule, ExtractionError> {
        if !self.cache.contains_key(&i) {
            let members = self.dendrogram.leaf_set(i);
            let (rule, order) = make_rule(&self.graph, &members)?;
            let dl = rule_dl::<f64>(&rule)?.bits();
            self.cache.insert(
                i,
                CandidateRule {
                    members,
                    rule,
                    order,
                    dl,
                },
            );
        }
        Ok(&self.cache[&i])
    }

    /// Grammar DL increase if this rule were added now.
    fn grammar_delta(&self, rule: &Rule, dl: f64) -> f64 {
        match self.grammar.find(&rule.key) {
            Some(j) => {
                let existing = &self.grammar.rules[j];
                lhs_dl::<f64>(existing.omega, existing.frequency + 1).bits()
                    - lhs_dl::<f64>(existing.omega, existing.frequency).bits()
            }
            None => dl,
        }
    }

    fn score_all(&mut self, candidates: &[TreeIndex]) -> Result<Vec<Score>, ExtractionError> {
        for &i in candidates {
            self.candidate_rule(i)?;
        }
        let stats = if self.policy.is_mdl() {
            Some(DlStats::of(&self.graph))
        } else {
            None
        };
        let mut by_key: BTreeMap<&CanonicalKey, Vec<TreeIndex>> = BTreeMap::new();
        if self.policy == ScoringPolicy::GlobalMdl {
            for &i in candidates {
                by_key.entry(&self.cache[&i].rule.key).or_default().push(i);
            }
        }
        let mut scores = Vec::with_capacity(candidates.len());
        for &i in candidates {
            let c = &self.cache[&i];
            let simple = simple_score(c.members.len(), self.mu).unsigned_abs() as f64;
            let (value, tie) = match self.policy {
                ScoringPolicy::Random => (simple, self.rng.gen::<u32>() as f64),
                ScoringPolicy::GreedyLevel => (simple, 0.0),
                ScoringPolicy::GreedyDl | ScoringPolicy::GreedyLevelDl => {
                    (simple, self.grammar_delta(&c.rule, c.dl))
                }
                ScoringPolicy::LocalMdl => {
                    let stats = stats.as_ref().unwrap();
                    (
                        mdl_score_with(stats, &self.graph, c.dl, &[&c.members])?,
                        0.0,
                    )
                }
                ScoringPolicy::GlobalMdl => {
                    let group = disjoint(&self.dendrogram, &by_key[&c.rule.key]);
                    let sets: Vec<&BTreeSet<NodeId>> =
                        group.iter().map(|j| &self.cache[j].members).collect();
                    (
                        mdl_score_with(stats.as_ref().unwrap(), &self.graph, c.dl, &sets)?,
                        0.0,
                    )
                }
            };
            scores.push(Score {
                value,
                tie,
                depth: self.dendrogram.depth(i),
                min_node: *c.members.iter().next().unwrap(),
            });
        }
        Ok(scores)
    }

    /// Contracts one subtree, records the rule and the derivation step.
    fn contract(
        &mut self,
        i: TreeIndex,
        start: bool,
        fallback: bool,
    ) -> Result<(), ExtractionError> {
        let CandidateRule {
            members,
            mut rule,
            order,
            ..
        } = match self.cache.remove(&i) {
            Some(c) => c,
            None => {
                let members = self.dendrogram.leaf_set(i);
                let (rule, order) = make_rule(&self.graph, &members)?;
                CandidateRule {
                    members,
                    rule,
                    order,
                    dl: 0.0,
                }
            }
        };
        rule.start = start;
        rule.fallback = fallback;
        let wiring = wiring(&self.graph, &members, &order);
        let x = self
            .graph
            .contract_in_place(&members, NodeLabel::Nonterminal(rule.omega))?;
        let index = self.grammar.insert(rule);
        self.grammar.derivation.steps.push(DerivationStep {
            nonterminal: x,
            rule: index,
            nodes: order,
            wiring,
        });
        let mut cur = Some(i);
        while let Some(j) = cur {
            self.cache.remove(&j);
            cur = self.dendrogram.parent(j);
        }
        self.dendrogram.replace_with_leaf(i, x);
        Ok(())
    }
}

fn wiring(g: &Multigraph, members: &BTreeSet<NodeId>, order: &[NodeId]) -> Vec<Wire> {
    let mut out = Vec::new();
    for (local, v) in order.iter().enumerate() {
        for (w, mult) in g.neighbors(*v) {
            if !members.contains(&w) {
                out.push(Wire {
                    node: local as u32,
                    neighbor: w,
                    mult,
                });
            }
        }
    }
    out
}

/// Keeps a maximal set of pairwise non-nested subtrees, shallower first.
fn disjoint(d: &Dendrogram, selection: &[TreeIndex]) -> Vec<TreeIndex> {
    let mut sorted = selection.to_vec();
    sorted.sort_by_key(|i| (d.depth(*i), *i));
    let mut kept: Vec<TreeIndex> = Vec::new();
    for i in sorted {
        if kept
            .iter()
            .all(|k| *k != i && !d.is_ancestor(*k, i) && !d.is_ancestor(i, *k))
        {
            kept.push(i);
        }
    }
    kept
}

/// Best candidate under `policy`; for Global MDL every candidate sharing the
/// winner's canonical key, reduced to a disjoint set.
pub fn select_best(
    d: &Dendrogram,
    candidates: &[TreeIndex],
    scores: &[Score],
    keys: &[&CanonicalKey],
    policy: ScoringPolicy,
) -> Vec<TreeIndex> {
    assert!(!candidates.is_empty(), "select_best needs candidates");
    let best = (0..candidates.len())
        .min_by(|a, b| scores[*a].cmp_key(&scores[*b], policy))
        .unwrap();
    if policy != ScoringPolicy::GlobalMdl {
        return vec![candidates[best]];
    }
    let same: Vec<TreeIndex> = (0..candidates.len())
        .filter(|j| keys[*j] == keys[best])
        .map(|j| candidates[j])
        .collect();
    let mut chosen = disjoint(d, &same);
    // the winner itself goes first
    chosen.sort_by_key(|i| *i != candidates[best]);
    chosen
}

/// Replaces each selected subtree with a leaf for its nonterminal, skipping
/// subtrees nested in an earlier, shallower selection.
pub fn update_dendrogram(d: &mut Dendrogram, selection: &[(TreeIndex, NodeId)]) {
    let keep = disjoint(d, &selection.iter().map(|(i, _)| *i).collect::<Vec<_>>());
    for (i, x) in selection {
        if keep.contains(i) {
            d.replace_with_leaf(*i, *x);
        }
    }
}

/// Builds the dendrogram for `params.strategy` and extracts a grammar.
pub fn extract_graph(g: &Multigraph, params: ExtractionParams) -> Result<Grammar, ExtractionError> {
    let d = build_dendrogram(g, params.strategy, params.seed)?;
    extract(g, d, params)
}

/// Extracts a grammar from `g` using dendrogram `d` built over it.
pub fn extract(
    g: &Multigraph,
    d: Dendrogram,
    params: ExtractionParams,
) -> Result<Grammar, ExtractionError> {
    if params.mu < 2 {
        return Err(ExtractionError::InvalidMu(params.mu));
    }
    if d.leaf_set(d.root()) != g.nodes().collect::<BTreeSet<_>>() {
        return Err(ExtractionError::DendrogramMismatch);
    }
    let mut ex = Extractor {
        graph: g.clone(),
        dendrogram: d,
        grammar: Grammar::new(params),
        mu: params.mu,
        policy: params.policy,
        rng: substream(params.seed, Stream::TieBreak),
        cache: HashMap::new(),
    };
    let limit = g.node_count();
    let mut iterations = 0;
    while !ex.dendrogram.is_exhausted() {
        iterations += 1;
        if iterations > limit {
            return Err(ExtractionError::NoProgress {
                iterations,
                nodes: limit,
            });
        }
        let root = ex.dendrogram.root();
        if ex.dendrogram.is_leaf(root) {
            // single-node graph: the start rule is the node itself
            ex.contract(root, true, false)?;
            break;
        }
        let Candidates { nodes, forced } = enumerate_candidates(&ex.dendrogram, ex.mu);
        let scores = ex.score_all(&nodes)?;
        let keys: Vec<&CanonicalKey> = nodes.iter().map(|i| &ex.cache[i].rule.key).collect();
        let chosen = select_best(&ex.dendrogram, &nodes, &scores, &keys, ex.policy);
        log::trace!(
            "iteration {iterations}: contracting {} subtree(s)",
            chosen.len()
        );
        for i in chosen {
            let start = i == root;
            ex.contract(i, start, forced)?;
        }
    }
    debug_assert_eq!(ex.graph.node_count(), 1);
    Ok(ex.grammar)
}
