use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use hoprank::clickstream::{
    extract_transitions, sessionize, ClassificationRules, ExtractConfig, ExtractStats, LogFormat, LogSchema,
    NavSelector, RecordStream, SessionConfig,
};
use hoprank::graph::{load_edge_list, Delimiter, EdgeListFormat};

use crate::error::{CliError, CliResult};
use crate::workdir::{prepare_output, read_text, write_json, WorkDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogFormatArg {
    Tsv,
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Edge list, one `a b` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Single-character edge-list delimiter; runs of whitespace when absent.
    #[arg(long)]
    graph_delimiter: Option<char>,
    /// Skip the first line of the edge list.
    #[arg(long)]
    graph_header: bool,
    /// Request log.
    #[arg(long)]
    log: PathBuf,
    #[arg(long, value_enum, default_value_t = LogFormatArg::Tsv)]
    log_format: LogFormatArg,
    /// Classification rules (TOML). Required when the log carries referrers.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Keep only requests of this ontology.
    #[arg(long)]
    ontology: Option<String>,
    /// Inactivity gap, in seconds, that ends a session.
    #[arg(long, default_value_t = 3600.0)]
    session_gap: f64,
    /// Sessions with fewer requests are discarded.
    #[arg(long, default_value_t = 2)]
    min_session_length: usize,
    /// Discard transitions from a concept to itself.
    #[arg(long)]
    drop_self_loops: bool,
    /// Fail on the first malformed log line instead of skipping it.
    #[arg(long)]
    strict: bool,
    /// Work directory to create.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Serialize)]
struct GraphSummary {
    input_nodes: usize,
    input_edges: usize,
    components: usize,
    lcc_nodes: usize,
    lcc_edges: usize,
}

#[derive(Debug, Default, Serialize)]
struct LogSummary {
    requests: u64,
    malformed_lines: usize,
    other_ontology: u64,
    unknown_concept: u64,
    outside_lcc: u64,
    with_referrer: u64,
    sessions: usize,
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    command: &'static str,
    graph: GraphSummary,
    log: LogSummary,
    transitions: ExtractStats,
    per_type: BTreeMap<String, u64>,
    session_gap_secs: f64,
    min_session_length: usize,
    drop_self_loops: bool,
}

fn validate(args: &IngestArgs) -> CliResult<()> {
    if !(args.session_gap.is_finite() && args.session_gap > 0.0) {
        return Err(CliError::Usage(format!(
            "--session-gap must be positive, got {}",
            args.session_gap
        )));
    }
    if args.min_session_length < 2 {
        return Err(CliError::Usage("--min-session-length must be at least 2".into()));
    }
    for path in [Some(&args.graph), Some(&args.log), args.rules.as_ref()].into_iter().flatten() {
        if !path.is_file() {
            return Err(CliError::Input(format!("{}: no such file", path.display())));
        }
    }
    Ok(())
}

pub fn run(args: IngestArgs) -> CliResult<()> {
    validate(&args)?;
    let rules = match &args.rules {
        Some(path) => ClassificationRules::from_toml_str(&read_text(path)?)
            .map_err(CliError::data(path.display()))?,
        None => ClassificationRules::default(),
    };

    let format = EdgeListFormat {
        delimiter: args.graph_delimiter.map_or(Delimiter::Whitespace, Delimiter::Char),
        header: args.graph_header,
    };
    let file = File::open(&args.graph).map_err(CliError::io(&args.graph))?;
    let full = load_edge_list(BufReader::new(file), format).map_err(CliError::data(args.graph.display()))?;
    let components = full.connected_components().sizes.len();
    let (lcc, _) = full
        .largest_connected_component()
        .map_err(CliError::data(args.graph.display()))?;
    if lcc.node_count() < 2 {
        return Err(CliError::Input(format!(
            "{}: largest connected component has fewer than 2 nodes",
            args.graph.display()
        )));
    }

    let schema = LogSchema {
        format: match args.log_format {
            LogFormatArg::Tsv => LogFormat::Delimited { delimiter: b'\t' },
            LogFormatArg::Csv => LogFormat::Delimited { delimiter: b',' },
            LogFormatArg::Jsonl => LogFormat::JsonLines,
        },
        ..LogSchema::default()
    };
    let file = File::open(&args.log).map_err(CliError::io(&args.log))?;
    let mut stream =
        RecordStream::new(BufReader::new(file), &schema, args.strict).map_err(CliError::data(args.log.display()))?;
    let mut log = LogSummary::default();
    let mut records = Vec::new();
    for rec in stream.by_ref() {
        let rec = rec.map_err(CliError::data(args.log.display()))?;
        log.requests += 1;
        if args.ontology.as_ref().is_some_and(|o| *o != rec.ontology) {
            log.other_ontology += 1;
            continue;
        }
        if rec.referrer.is_some() {
            log.with_referrer += 1;
        }
        if full.id_of(&rec.concept).is_none() {
            log.unknown_concept += 1;
        } else if lcc.id_of(&rec.concept).is_none() {
            log.outside_lcc += 1;
        }
        records.push(rec);
    }
    log.malformed_lines = stream.skipped().len();
    for s in stream.skipped().iter().take(5) {
        eprintln!("skipped {} line {}: {}", args.log.display(), s.line, s.reason);
    }
    if log.with_referrer > 0 && args.rules.is_none() {
        return Err(CliError::Usage(format!(
            "{} has {} requests with referrers; pass --rules to classify them",
            args.log.display(),
            log.with_referrer
        )));
    }

    let session_config = SessionConfig {
        break_threshold_secs: args.session_gap,
        min_length: args.min_session_length,
    };
    let sessions = sessionize(records, &rules, &session_config);
    log.sessions = sessions.len();
    let extract = ExtractConfig {
        drop_self_loops: args.drop_self_loops,
    };
    let (transitions, stats) = extract_transitions(&sessions, &lcc, &extract);
    if transitions.is_empty() {
        return Err(CliError::Input(format!(
            "{} yields no transitions inside the largest connected component",
            args.log.display()
        )));
    }

    prepare_output(&args.out, args.force)?;
    let work = WorkDir::new(&args.out);
    let (graph, transitions) = work.write_dataset(&lcc, &transitions)?;
    let per_type = NavSelector::EVERY
        .iter()
        .map(|&sel| (sel.to_string(), transitions.nobs(sel)))
        .collect();
    let summary = IngestSummary {
        command: "ingest",
        graph: GraphSummary {
            input_nodes: full.node_count(),
            input_edges: full.edge_count(),
            components,
            lcc_nodes: graph.node_count(),
            lcc_edges: graph.edge_count(),
        },
        log,
        transitions: stats,
        per_type,
        session_gap_secs: args.session_gap,
        min_session_length: args.min_session_length,
        drop_self_loops: args.drop_self_loops,
    };
    write_json(&work.data().join("summary.json"), &summary)?;
    eprintln!(
        "ingested {} transitions on {} nodes into {}",
        stats.kept,
        graph.node_count(),
        args.out.display()
    );
    Ok(())
}
