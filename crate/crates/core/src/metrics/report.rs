//! Comparison of generated graphs against the original.

use thiserror::Error;

use super::graphlets::{degree_summary, graphlet_census, DegreeSummary, GraphletCensus};
use super::spectrum::{adjacency_spectrum, SpectrumError};
use crate::multigraph::Multigraph;

/// Graphlet disagreements above this are flagged.
pub const DISAGREEMENT_FLAG: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no generated graphs to compare")]
    NoGeneratedGraphs,
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// `|log₁₀((ĉ + 1) / (c + 1))|`.
pub fn disagreement(generated: u64, original: u64) -> f64 {
    ((generated as f64 + 1.0) / (original as f64 + 1.0))
        .log10()
        .abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub degrees: DegreeSummary,
    pub census: GraphletCensus,
}

impl GraphMetrics {
    pub fn of(g: &Multigraph) -> GraphMetrics {
        let simple = g.collapsed();
        GraphMetrics {
            nodes: simple.node_count(),
            edges: simple.edge_count(),
            degrees: degree_summary(&simple),
            census: graphlet_census(&simple),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub metrics: GraphMetrics,
    pub lambda_distance: f64,
    /// Per graphlet, in [`GraphletCensus::NAMES`] order.
    pub disagreement: [f64; 9],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub original: GraphMetrics,
    pub rows: Vec<ComparisonRow>,
    pub compression_ratio: Option<f64>,
}

/// Compares every named graph in `generated` with `original`.
pub fn compare_report(
    original: &Multigraph,
    generated: &[(String, Multigraph)],
    compression_ratio: Option<f64>,
) -> Result<Report, ReportError> {
    if generated.is_empty() {
        return Err(ReportError::NoGeneratedGraphs);
    }
    let base = GraphMetrics::of(original);
    let base_spectrum = adjacency_spectrum::<f64>(&original.collapsed())?;
    let mut rows = Vec::with_capacity(generated.len());
    for (name, g) in generated {
        let metrics = GraphMetrics::of(g);
        let spectrum = adjacency_spectrum::<f64>(&g.collapsed())?;
        let observed = metrics.census.as_array();
        let expected = base.census.as_array();
        let disagreement = std::array::from_fn(|i| disagreement(observed[i], expected[i]));
        rows.push(ComparisonRow {
            name: name.clone(),
            metrics,
            lambda_distance: spectrum.distance(&base_spectrum),
            disagreement,
        });
    }
    Ok(Report {
        original: base,
        rows,
        compression_ratio,
    })
}

impl Report {
    pub fn mean_lambda_distance(&self) -> f64 {
        mean(self.rows.iter().map(|r| r.lambda_distance))
    }

    pub fn mean_disagreement(&self) -> [f64; 9] {
        std::array::from_fn(|i| mean(self.rows.iter().map(|r| r.disagreement[i])))
    }

    /// Graphlet names whose mean disagreement exceeds [`DISAGREEMENT_FLAG`].
    pub fn flagged(&self) -> Vec<&'static str> {
        let means = self.mean_disagreement();
        GraphletCensus::NAMES
            .iter()
            .zip(means)
            .filter(|(_, d)| *d > DISAGREEMENT_FLAG)
            .map(|(n, _)| *n)
            .collect()
    }

    fn header() -> Vec<String> {
        let mut h: Vec<String> = [
            "graph",
            "nodes",
            "edges",
            "degree_mean",
            "degree_max",
            "lambda_distance",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(GraphletCensus::NAMES.iter().map(|n| n.to_string()));
        h.extend(
            GraphletCensus::NAMES
                .iter()
                .map(|n| format!("disagree_{n}")),
        );
        h.push("compression_ratio".into());
        h
    }

    /// One row per generated graph followed by a `mean` row.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let ratio = self
            .compression_ratio
            .map(|r| format!("{r:.6}"))
            .unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::header())?;
        for r in &self.rows {
            let mut rec = vec![
                r.name.clone(),
                r.metrics.nodes.to_string(),
                r.metrics.edges.to_string(),
                format!("{:.6}", r.metrics.degrees.mean),
                r.metrics.degrees.max.to_string(),
                format!("{:.6}", r.lambda_distance),
            ];
            rec.extend(r.metrics.census.as_array().iter().map(u64::to_string));
            rec.extend(r.disagreement.iter().map(|d| format!("{d:.6}")));
            rec.push(ratio.clone());
            w.write_record(rec)?;
        }
        let rows = &self.rows;
        let mut rec = vec![
            "mean".to_string(),
            format!("{:.6}", mean(rows.iter().map(|r| r.metrics.nodes as f64))),
            format!("{:.6}", mean(rows.iter().map(|r| r.metrics.edges as f64))),
            format!("{:.6}", mean(rows.iter().map(|r| r.metrics.degrees.mean))),
            format!(
                "{:.6}",
                mean(rows.iter().map(|r| r.metrics.degrees.max as f64))
            ),
            format!("{:.6}", self.mean_lambda_distance()),
        ];
        rec.extend((0..9).map(|i| {
            format!(
                "{:.6}",
                mean(rows.iter().map(|r| r.metrics.census.as_array()[i] as f64))
            )
        }));
        rec.extend(self.mean_disagreement().iter().map(|d| format!("{d:.6}")));
        rec.push(ratio);
        w.write_record(rec)?;
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Whitespace-separated table: one line per graphlet with the original
    /// count, mean generated count and mean disagreement.
    pub fn to_gnuplot(&self) -> String {
        let mut out = String::from("# graphlet original generated_mean disagreement\n");
        let original = self.original.census.as_array();
        let means = self.mean_disagreement();
        for (i, name) in GraphletCensus::NAMES.iter().enumerate() {
            let generated = mean(
                self.rows
                    .iter()
                    .map(|r| r.metrics.census.as_array()[i] as f64),
            );
            out.push_str(&format!(
                "{name} {} {generated:.6} {:.6}\n",
                original[i], means[i]
            ));
        }
        out
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
