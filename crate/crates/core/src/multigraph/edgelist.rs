//! Plain-text edge lists: one `u v` pair per line, `#` starts a comment line.
//!
//! Repeated pairs accumulate multiplicity. Self-loops are skipped with a
//! warning. Input ids are arbitrary non-negative integers; nodes get handles
//! in first-seen order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use super::{Multigraph, NodeId, NodeLabel};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected two non-negative integer ids, got {content:?}")]
    Parse { line: usize, content: String },
    #[error("edge list contains no edges")]
    Empty,
}

/// A loaded graph plus the external id of each node handle.
#[derive(Clone, Debug)]
pub struct EdgeList {
    pub graph: Multigraph,
    pub external_ids: Vec<u64>,
}

pub fn parse<R: Read>(reader: R) -> Result<EdgeList, EdgeListError> {
    let mut graph = Multigraph::new();
    let mut handles: HashMap<u64, NodeId> = HashMap::new();
    let mut external_ids = Vec::new();
    let mut intern = |graph: &mut Multigraph, id: u64| -> NodeId {
        *handles.entry(id).or_insert_with(|| {
            external_ids.push(id);
            graph.add_node(NodeLabel::Terminal)
        })
    };
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace().map(str::parse::<u64>);
        let (u, v) = match (fields.next(), fields.next()) {
            (Some(Ok(u)), Some(Ok(v))) => (u, v),
            _ => {
                return Err(EdgeListError::Parse {
                    line: lineno + 1,
                    content: line.clone(),
                })
            }
        };
        if u == v {
            log::warn!("line {}: ignoring self-loop on {}", lineno + 1, u);
            continue;
        }
        let a = intern(&mut graph, u);
        let b = intern(&mut graph, v);
        graph
            .add_edge(a, b, 1)
            .expect("both endpoints were just interned");
    }
    if graph.edge_count() == 0 {
        return Err(EdgeListError::Empty);
    }
    Ok(EdgeList {
        graph,
        external_ids,
    })
}

pub fn parse_str(text: &str) -> Result<EdgeList, EdgeListError> {
    parse(text.as_bytes())
}

pub fn read_path(path: impl AsRef<Path>) -> Result<EdgeList, EdgeListError> {
    parse(std::fs::File::open(path)?)
}

/// Serialises `g` using its node handles as ids, one line per unit of
/// multiplicity.
pub fn to_string(g: &Multigraph) -> String {
    let mut out = String::new();
    for (u, v, m) in g.edges() {
        for _ in 0..m {
            let _ = writeln!(out, "{} {}", u, v);
        }
    }
    out
}

pub fn write_path(g: &Multigraph, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, to_string(g))
}
