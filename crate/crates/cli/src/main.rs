use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use cnrg::generation::{generate_with, GenerationConfig};
use cnrg::mdl::{compression_ratio, grammar_dl, graph_dl};
use cnrg::metrics::compare_report;
use cnrg::multigraph::edgelist;
use cnrg::{
    build_dendrogram, extract, ClusteringStrategy, ExtractionParams, Grammar, Multigraph,
    ScoringPolicy,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("input: {0}")]
    Input(String),
    #[error("grammar: {0}")]
    Grammar(String),
    #[error("evaluation: {0}")]
    Evaluation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Grammar(_) => 3,
            CliError::Evaluation(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cnrg",
    version,
    about = "Extract, generate and evaluate node replacement grammars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Clustering {
    Louvain,
    Random,
    Fiedler,
}

impl From<Clustering> for ClusteringStrategy {
    fn from(c: Clustering) -> Self {
        match c {
            Clustering::Louvain => ClusteringStrategy::LouvainRecursive,
            Clustering::Random => ClusteringStrategy::RandomBipartition,
            Clustering::Fiedler => ClusteringStrategy::FiedlerBipartition,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Policy {
    Random,
    GreedyDl,
    GreedyLevel,
    GreedyLevelDl,
    LocalMdl,
    GlobalMdl,
}

impl From<Policy> for ScoringPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Random => ScoringPolicy::Random,
            Policy::GreedyDl => ScoringPolicy::GreedyDl,
            Policy::GreedyLevel => ScoringPolicy::GreedyLevel,
            Policy::GreedyLevelDl => ScoringPolicy::GreedyLevelDl,
            Policy::LocalMdl => ScoringPolicy::LocalMdl,
            Policy::GlobalMdl => ScoringPolicy::GlobalMdl,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a grammar from an edge list.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "louvain")]
        clustering: Clustering,
        #[arg(long, value_enum, default_value = "greedy-level-dl")]
        policy: Policy,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..=10))]
        mu: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate graphs from a grammar file.
    Generate {
        /// Grammar file; defaults to `<out>/grammar.json`.
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_size_mult: usize,
        #[arg(long, value_enum, default_value = "on")]
        collapse_multiedges: Switch,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare generated edge lists with the original graph.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        /// Directory of generated `.txt` edge lists.
        #[arg(long)]
        generated: PathBuf,
        /// Grammar whose compression ratio is reported.
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write a whitespace-separated table for plotting.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Rebuild the original graph from a grammar's derivation.
    Replay {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract {
            input,
            clustering,
            policy,
            mu,
            seed,
            out,
        } => {
            let params = ExtractionParams {
                strategy: clustering.into(),
                policy: policy.into(),
                mu: mu as usize,
                seed,
            };
            cmd_extract(&input, params, &out)
        }
        Command::Generate {
            grammar,
            count,
            seed,
            max_size_mult,
            collapse_multiedges,
            out,
        } => {
            let grammar = grammar.unwrap_or_else(|| out.join("grammar.json"));
            let collapse = matches!(collapse_multiedges, Switch::On);
            cmd_generate(&grammar, count, seed, max_size_mult, collapse, &out)
        }
        Command::Evaluate {
            input,
            generated,
            grammar,
            out,
            gnuplot,
        } => cmd_evaluate(&input, &generated, grammar.as_deref(), &out, gnuplot),
        Command::Replay { grammar, out } => cmd_replay(&grammar, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cnrg: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn read_graph(path: &Path) -> Result<Multigraph, CliError> {
    edgelist::read_path(path)
        .map(|e| e.graph)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_grammar(path: &Path) -> Result<Grammar, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Grammar(format!("{}: {e}", path.display())))?;
    Grammar::from_json(&text).map_err(|e| CliError::Grammar(format!("{}: {e}", path.display())))
}

fn create_dir(out: &Path, wrap: fn(String) -> CliError) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| wrap(format!("{}: {e}", out.display())))
}

fn write(path: &Path, text: &str, wrap: fn(String) -> CliError) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| wrap(format!("{}: {e}", path.display())))
}

fn cmd_extract(input: &Path, params: ExtractionParams, out: &Path) -> Result<(), CliError> {
    let g = read_graph(input)?;
    let started = Instant::now();
    let d = build_dendrogram(&g, params.strategy, params.seed)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let grammar = extract(&g, d, params).map_err(|e| CliError::Grammar(e.to_string()))?;
    let seconds = started.elapsed().as_secs_f64();
    let dl_h = graph_dl::<f64>(&g)
        .map_err(|e| CliError::Input(e.to_string()))?
        .bits();
    let dl_g = grammar_dl::<f64>(&grammar)
        .map_err(|e| CliError::Grammar(e.to_string()))?
        .bits();

    create_dir(out, CliError::Input)?;
    write(
        &out.join("grammar.json"),
        &grammar.to_json(),
        CliError::Input,
    )?;
    let derivation =
        serde_json::to_string_pretty(&grammar.derivation).expect("derivation serialises") + "\n";
    write(&out.join("derivation.json"), &derivation, CliError::Input)?;
    println!(
        "{} {} {} {:.4} {:.4} {:.4} {:.3}",
        g.node_count(),
        g.edge_count(),
        grammar.rule_count(),
        dl_h,
        dl_g,
        dl_g / dl_h,
        seconds
    );
    Ok(())
}

#[derive(Serialize)]
struct ManifestEntry {
    seed: u64,
    file: String,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize)]
struct Manifest {
    grammar: String,
    count: usize,
    max_size: usize,
    collapse_multiedges: bool,
    graphs: Vec<ManifestEntry>,
}

fn cmd_generate(
    grammar_path: &Path,
    count: usize,
    seed: u64,
    max_size_mult: usize,
    collapse: bool,
    out: &Path,
) -> Result<(), CliError> {
    let grammar = read_grammar(grammar_path)?;
    let config = GenerationConfig {
        max_size: max_size_mult.max(1) * grammar.source_node_count().max(1),
        ..GenerationConfig::for_grammar(&grammar)
    };
    if count == 0 {
        log::warn!("count is 0; writing an empty manifest");
        eprintln!("cnrg: warning: --count 0, no graphs generated");
    }
    create_dir(out, CliError::Grammar)?;
    let graphs: Vec<(u64, Multigraph)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let g = generate_with(&grammar, s, &config)
                .map_err(|e| CliError::Grammar(format!("seed {s}: {e}")))?;
            Ok((s, if collapse { g.collapsed() } else { g }))
        })
        .collect::<Result<_, CliError>>()?;
    let mut entries = Vec::with_capacity(graphs.len());
    for (s, g) in &graphs {
        let file = format!("gen_{s}.txt");
        write(&out.join(&file), &edgelist::to_string(g), CliError::Grammar)?;
        entries.push(ManifestEntry {
            seed: *s,
            file,
            nodes: g.node_count(),
            edges: g.edge_count(),
        });
    }
    let manifest = Manifest {
        grammar: grammar_path.display().to_string(),
        count,
        max_size: config.max_size,
        collapse_multiedges: collapse,
        graphs: entries,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    write(&out.join("manifest.json"), &text, CliError::Grammar)?;
    println!("{count} graph(s) written to {}", out.display());
    Ok(())
}

fn cmd_evaluate(
    input: &Path,
    generated: &Path,
    grammar: Option<&Path>,
    out: &Path,
    gnuplot: bool,
) -> Result<(), CliError> {
    let original = read_graph(input)?;
    let ratio = match grammar {
        Some(p) => {
            let g = read_grammar(p)?;
            Some(
                compression_ratio::<f64>(&g, &original)
                    .map_err(|e| CliError::Evaluation(e.to_string()))?,
            )
        }
        None => None,
    };
    let entries = std::fs::read_dir(generated)
        .map_err(|e| CliError::Evaluation(format!("{}: {e}", generated.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Evaluation(format!(
            "no .txt edge lists in {}",
            generated.display()
        )));
    }
    let mut graphs = Vec::with_capacity(files.len());
    for f in &files {
        let g = edgelist::read_path(f)
            .map_err(|e| CliError::Evaluation(format!("{}: {e}", f.display())))?;
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        graphs.push((name, g.graph));
    }
    let report = compare_report(&original, &graphs, ratio)
        .map_err(|e| CliError::Evaluation(e.to_string()))?;
    create_dir(out, CliError::Evaluation)?;
    let csv = report
        .to_csv()
        .map_err(|e| CliError::Evaluation(e.to_string()))?;
    write(&out.join("report.csv"), &csv, CliError::Evaluation)?;
    if gnuplot {
        write(
            &out.join("report.dat"),
            &report.to_gnuplot(),
            CliError::Evaluation,
        )?;
    }
    println!(
        "{} graph(s), mean lambda distance {:.4}",
        report.rows.len(),
        report.mean_lambda_distance()
    );
    let flagged = report.flagged();
    if !flagged.is_empty() {
        println!("flagged graphlets: {}", flagged.join(" "));
    }
    Ok(())
}

fn cmd_replay(grammar: &Path, out: &Path) -> Result<(), CliError> {
    let grammar = read_grammar(grammar)?;
    let g = cnrg::replay(&grammar).map_err(|e| CliError::Grammar(e.to_string()))?;
    create_dir(out, CliError::Grammar)?;
    write(
        &out.join("replay.txt"),
        &edgelist::to_string(&g),
        CliError::Grammar,
    )?;
    println!("{} {}", g.node_count(), g.edge_count());
    Ok(())
}
