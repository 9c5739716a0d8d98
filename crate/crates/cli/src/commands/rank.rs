use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;

use hoprank::clickstream::{NavSelector, NavType};
use hoprank::models::{read_model_json, ModelContext};
use hoprank::selection::{
    evaluate_models, winner_matrix, write_evaluations_tsv, DatasetRankings, InputFile, RunManifest,
};

use super::fit::{load, FitRecord, Loaded};
use super::parse_models;
use crate::error::{CliError, CliResult};
use crate::workdir::{prepare_output, read_json, write_json, write_with, WorkDir};

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Work directory holding `fit` output.
    #[arg(long)]
    work: PathBuf,
    /// Dataset name used in the tables; the directory name when absent.
    #[arg(long)]
    dataset: Option<String>,
    /// Restrict the ranking to these fitted models, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    models: Option<Vec<String>>,
    #[arg(long)]
    force: bool,
}

fn input(work: &WorkDir, path: &Path) -> CliResult<InputFile> {
    let mut file = InputFile::from_path(path).map_err(CliError::io(path))?;
    if let Ok(rel) = path.strip_prefix(work.root()) {
        file.path = rel.display().to_string();
    }
    Ok(file)
}

pub fn run(args: RankArgs) -> CliResult<()> {
    let work = WorkDir::new(&args.work);
    let fit_path = work.fit().join("fit.json");
    if !fit_path.is_file() {
        return Err(CliError::Input(format!("{} is missing; run `fit` first", fit_path.display())));
    }
    let fit: FitRecord = read_json(&fit_path)?;
    let models = match &args.models {
        None => fit.models.clone(),
        Some(list) => {
            let wanted = parse_models(list)?;
            if let Some(m) = wanted.iter().find(|m| !fit.models.contains(m)) {
                return Err(CliError::Usage(format!("model {m} was not fitted")));
            }
            wanted
        }
    };
    let dataset = args.dataset.clone().unwrap_or_else(|| work.default_name());
    if dataset.is_empty() || dataset.contains(['\t', '\n']) {
        return Err(CliError::Usage(format!("invalid dataset name {dataset:?}")));
    }

    let (loaded, diameter) = load(&work, Some(fit.diameter), fit.cache_budget_mb)?;
    let Loaded {
        graph,
        transitions,
        hops,
    } = &loaded;
    if graph.hash().to_string() != fit.graph_hash {
        return Err(CliError::data(work.graph_path().display())(hoprank::Error::GraphMismatch));
    }
    let ctx = ModelContext::new(graph, diameter).map_err(CliError::data("diameter"))?;

    let mut rankings = Vec::new();
    for ft in &fit.fitted {
        let nobs = transitions.nobs(ft.navtype);
        if nobs != ft.nobs {
            return Err(CliError::Input(format!(
                "{} has {nobs} transitions but was fitted on {}; rerun `fit`",
                ft.navtype, ft.nobs
            )));
        }
        let fitted = models
            .iter()
            .map(|&id| {
                let path = work.model_path(ft.navtype, id);
                let file = File::open(&path).map_err(CliError::io(&path))?;
                let record = read_model_json(BufReader::new(file)).map_err(CliError::data(path.display()))?;
                if record.model != id || record.navtype != ft.navtype.to_string() {
                    return Err(CliError::Input(format!("{}: holds a different model", path.display())));
                }
                record.to_model(&ctx).map_err(CliError::data(path.display()))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let ranking = evaluate_models(&ctx, transitions, ft.navtype, hops, &fitted, fit.config.smoothing)
            .map_err(CliError::data(format!("scoring {}", ft.navtype)))?;
        rankings.push(ranking);
    }
    let result = DatasetRankings {
        dataset,
        rankings,
        skipped: fit.skipped.clone(),
    };

    prepare_output(&work.rank(), args.force)?;
    let datasets = std::slice::from_ref(&result);
    write_with(&work.rank().join("evaluations.tsv"), |w| Ok(write_evaluations_tsv(w, datasets)?))?;
    write_with(&work.rank().join("winners.tsv"), |w| {
        Ok(winner_matrix(datasets, &NavSelector::EVERY).write_tsv(w)?)
    })?;
    write_json(&work.rank().join("rankings.json"), &result)?;

    let mut inputs = BTreeMap::new();
    inputs.insert("graph".to_owned(), input(&work, &work.graph_path())?);
    for nav in NavType::ALL {
        let path = work.transitions_dir().join(format!("{nav}.tsv"));
        if path.is_file() {
            inputs.insert(format!("transitions.{nav}"), input(&work, &path)?);
        }
    }
    inputs.insert("fit".to_owned(), input(&work, &fit_path)?);
    let config = serde_json::json!({
        "dataset": result.dataset,
        "models": models,
        "fit": fit,
    });
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        command: "rank".to_owned(),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        graph_hash: fit.graph_hash.clone(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        diameter,
        inputs,
        config,
        skipped: fit.skipped.clone(),
    };
    write_json(&work.rank().join("manifest.json"), &manifest)?;

    for r in &result.rankings {
        if let Some(best) = r.winner() {
            eprintln!("{}: {} wins", r.navtype, best.label());
        }
    }
    Ok(())
}
