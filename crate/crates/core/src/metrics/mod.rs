//! Metrics for comparing graphs: spectra, graphlets and batch reports.

pub mod graphlets;
pub mod report;
pub mod spectrum;

pub use graphlets::{degree_summary, graphlet_census, DegreeSummary, GraphletCensus};
pub use report::{compare_report, disagreement, ComparisonRow, GraphMetrics, Report, ReportError};
pub use spectrum::{adjacency_spectrum, lambda_distance, Spectrum, SpectrumError};
