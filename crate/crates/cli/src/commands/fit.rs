use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use hoprank::clickstream::{NavSelector, TransitionSet};
use hoprank::khop::{profile_sources_within, TransitionHops};
use hoprank::models::{fit_model, write_beta_rows, write_model_json, ModelConfig, ModelContext, ModelId, ModelRecord};
use hoprank::selection::{Skipped, DEFAULT_MIN_TRANSITIONS};
use hoprank::Graph;

use super::{parse_models, parse_navtypes};
use crate::error::{CliError, CliResult};
use crate::workdir::{prepare_output, write_json, write_with, WorkDir};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Work directory produced by `ingest` or `synth`.
    #[arg(long)]
    work: PathBuf,
    /// Models to fit, comma separated (hoprank, pa, gravitational, rw-0, rw-1,
    /// rw-0.85, rw-empirical, mc). All when absent.
    #[arg(long, value_delimiter = ',')]
    models: Vec<String>,
    /// Navigation types to fit, comma separated (ALL, DE, DC, DU, EX, EL, ES, LS).
    #[arg(long, value_delimiter = ',')]
    navtypes: Vec<String>,
    /// Types with fewer transitions are skipped.
    #[arg(long, default_value_t = DEFAULT_MIN_TRANSITIONS)]
    min_transitions: u64,
    /// Damping of the links-only walk.
    #[arg(long)]
    links_alpha: Option<f64>,
    /// Damping of the PageRank walk.
    #[arg(long)]
    pagerank_alpha: Option<f64>,
    /// Additive smoothing applied when scoring.
    #[arg(long)]
    smoothing: Option<f64>,
    /// Memory for cached BFS profiles, in MiB.
    #[arg(long, default_value_t = 1024)]
    cache_budget_mb: usize,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FittedType {
    pub navtype: NavSelector,
    pub nobs: u64,
}

/// Settings and outcome of a `fit` run, read back by `rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRecord {
    pub graph_hash: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub diameter: u32,
    pub models: Vec<ModelId>,
    pub fitted: Vec<FittedType>,
    pub skipped: Vec<Skipped>,
    pub config: ModelConfig,
    pub min_transitions: u64,
    pub cache_budget_mb: usize,
}

/// Graph, transitions and hop distances of a work directory.
pub(crate) struct Loaded {
    pub graph: Graph,
    pub transitions: TransitionSet,
    pub hops: TransitionHops,
}

pub(crate) fn load(work: &WorkDir, diameter: Option<u32>, budget_mb: usize) -> CliResult<(Loaded, u32)> {
    let graph = work.load_graph()?;
    let transitions = work.load_transitions(&graph)?;
    let diameter = match diameter {
        Some(d) => d,
        None => graph.exact_diameter().map_err(CliError::data("diameter"))?,
    };
    let budget = budget_mb.saturating_mul(1 << 20);
    let cache = profile_sources_within(&graph, &transitions.sources(), diameter, budget)
        .map_err(CliError::data("BFS profiles"))?;
    let hops = TransitionHops::build(&graph, &transitions, &cache).map_err(CliError::data("hop distances"))?;
    Ok((
        Loaded {
            graph,
            transitions,
            hops,
        },
        diameter,
    ))
}

pub fn run(args: FitArgs) -> CliResult<()> {
    let models = if args.models.is_empty() {
        ModelId::ALL.to_vec()
    } else {
        parse_models(&args.models)?
    };
    let navtypes = if args.navtypes.is_empty() {
        NavSelector::EVERY.to_vec()
    } else {
        parse_navtypes(&args.navtypes)?
    };
    let defaults = ModelConfig::default();
    let config = ModelConfig {
        links_alpha: args.links_alpha.unwrap_or(defaults.links_alpha),
        pagerank_alpha: args.pagerank_alpha.unwrap_or(defaults.pagerank_alpha),
        smoothing: args.smoothing,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if args.cache_budget_mb == 0 {
        return Err(CliError::Usage("--cache-budget-mb must be positive".into()));
    }
    let work = WorkDir::new(&args.work);
    if !work.graph_path().is_file() {
        return Err(CliError::Input(format!(
            "{} holds no ingested data; run `ingest` or `synth` first",
            args.work.display()
        )));
    }

    let (loaded, diameter) = load(&work, None, args.cache_budget_mb)?;
    let Loaded {
        graph,
        transitions,
        hops,
    } = &loaded;
    let ctx = ModelContext::new(graph, diameter).map_err(CliError::data("diameter"))?;

    let mut fitted = Vec::new();
    let mut skipped = Vec::new();
    for &navtype in &navtypes {
        let nobs = transitions.nobs(navtype);
        if nobs < args.min_transitions.max(1) {
            eprintln!(
                "skipping {navtype}: {nobs} transitions, fewer than {}",
                args.min_transitions.max(1)
            );
            skipped.push(Skipped { navtype, nobs });
        } else {
            fitted.push(FittedType { navtype, nobs });
        }
    }
    if fitted.is_empty() {
        return Err(CliError::Input(format!(
            "no navigation type has at least {} transitions",
            args.min_transitions.max(1)
        )));
    }

    prepare_output(&work.fit(), args.force)?;
    let mut betas = Vec::new();
    let mut alphas = Vec::new();
    for ft in &fitted {
        for &id in &models {
            let model = fit_model(id, &ctx, transitions, ft.navtype, hops, &config)
                .map_err(CliError::data(format!("fitting {id} on {}", ft.navtype)))?;
            let record = ModelRecord::new(&model, &ctx, ft.navtype, ft.nobs);
            write_with(&work.model_path(ft.navtype, id), |w| {
                write_model_json(&record, &mut *w)?;
                writeln!(w)?;
                Ok(())
            })?;
            if let Some(beta) = model.beta() {
                betas.push((ft.navtype, beta.clone()));
            }
            if id == ModelId::EmpiricalPageRank {
                alphas.push((ft.navtype, model.alpha().expect("random walk model")));
            }
        }
    }
    if !betas.is_empty() {
        write_with(&work.fit().join("beta.tsv"), |w| {
            write_beta_rows(w, betas.iter().map(|(sel, b)| (*sel, b)))
        })?;
    }
    if !alphas.is_empty() {
        write_with(&work.fit().join("alpha.tsv"), |w| {
            writeln!(w, "navtype\talpha")?;
            for (sel, a) in &alphas {
                writeln!(w, "{sel}\t{a}")?;
            }
            Ok(())
        })?;
    }
    let record = FitRecord {
        graph_hash: graph.hash().to_string(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        diameter,
        models,
        fitted,
        skipped,
        config,
        min_transitions: args.min_transitions,
        cache_budget_mb: args.cache_budget_mb,
    };
    write_json(&work.fit().join("fit.json"), &record)?;
    eprintln!(
        "fitted {} models on {} navigation types (diameter {diameter})",
        record.models.len(),
        record.fitted.len()
    );
    Ok(())
}
