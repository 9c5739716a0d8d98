//! BIC scoring, per-navigation-type rankings and report tables.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clickstream::{NavSelector, TransitionSet};
use crate::error::{Error, Result};
use crate::khop::TransitionHops;
use crate::models::{fit_model, loglik, FittedModel, ModelConfig, ModelContext, ModelId};

/// Minimum number of transitions a navigation type needs to be evaluated.
pub const DEFAULT_MIN_TRANSITIONS: u64 = 2;

/// `-2 LL + nparams ln(nobs)`. An impossible model (`LL = -inf`) scores `+inf`.
pub fn bic(loglik: f64, nparams: u64, nobs: u64) -> Result<f64> {
    if nobs == 0 {
        return Err(Error::NoObservations);
    }
    if loglik == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(-2.0 * loglik + nparams as f64 * (nobs as f64).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub model: ModelId,
    pub loglik: f64,
    pub nparams: u64,
    pub nobs: u64,
    pub bic: f64,
}

impl Evaluation {
    pub fn new(model: ModelId, loglik: f64, nparams: u64, nobs: u64) -> Result<Self> {
        Ok(Evaluation {
            model,
            loglik,
            nparams,
            nobs,
            bic: bic(loglik, nparams, nobs)?,
        })
    }
}

/// Evaluations of one navigation type, best (lowest BIC) first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub navtype: NavSelector,
    pub evaluations: Vec<Evaluation>,
}

impl Ranking {
    /// Orders by BIC, then fewer parameters, then the fixed model order.
    pub fn new(navtype: NavSelector, mut evaluations: Vec<Evaluation>) -> Self {
        evaluations.sort_by(|a, b| {
            a.bic
                .total_cmp(&b.bic)
                .then(a.nparams.cmp(&b.nparams))
                .then(a.model.order().cmp(&b.model.order()))
        });
        Ranking { navtype, evaluations }
    }

    pub fn winner(&self) -> Option<ModelId> {
        self.evaluations.first().map(|e| e.model)
    }

    pub fn position(&self, model: ModelId) -> Option<usize> {
        self.evaluations.iter().position(|e| e.model == model)
    }
}

/// A navigation type left out because it had too few transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub navtype: NavSelector,
    pub nobs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRankings {
    pub dataset: String,
    pub rankings: Vec<Ranking>,
    pub skipped: Vec<Skipped>,
}

impl DatasetRankings {
    pub fn ranking(&self, navtype: NavSelector) -> Option<&Ranking> {
        self.rankings.iter().find(|r| r.navtype == navtype)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSettings {
    pub models: Vec<ModelId>,
    pub config: ModelConfig,
    pub min_transitions: u64,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        EvaluationSettings {
            models: ModelId::ALL.to_vec(),
            config: ModelConfig::default(),
            min_transitions: DEFAULT_MIN_TRANSITIONS,
        }
    }
}

/// Scores already-fitted models on the transitions of one type.
pub fn evaluate_models(
    ctx: &ModelContext<'_>,
    t: &TransitionSet,
    sel: NavSelector,
    hops: &TransitionHops,
    models: &[FittedModel],
    smoothing: Option<f64>,
) -> Result<Ranking> {
    let nobs = t.nobs(sel);
    let evaluations = models
        .iter()
        .map(|m| {
            let ll = loglik(m, ctx, t, sel, hops, smoothing)?;
            Evaluation::new(m.id, ll, m.nparams, nobs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ranking::new(sel, evaluations))
}

/// Fits and scores every requested model for one navigation type.
pub fn fit_and_evaluate(
    ctx: &ModelContext<'_>,
    t: &TransitionSet,
    sel: NavSelector,
    hops: &TransitionHops,
    settings: &EvaluationSettings,
) -> Result<(Ranking, Vec<FittedModel>)> {
    let fitted = settings
        .models
        .iter()
        .map(|&id| fit_model(id, ctx, t, sel, hops, &settings.config))
        .collect::<Result<Vec<_>>>()?;
    let ranking = evaluate_models(ctx, t, sel, hops, &fitted, settings.config.smoothing)?;
    Ok((ranking, fitted))
}

/// One ranking per navigation type with enough transitions; the rest are
/// listed as skipped.
pub fn evaluate_all(
    dataset: &str,
    ctx: &ModelContext<'_>,
    t: &TransitionSet,
    navtypes: &[NavSelector],
    hops: &TransitionHops,
    settings: &EvaluationSettings,
) -> Result<DatasetRankings> {
    if settings.models.is_empty() {
        return Err(Error::Config("no models requested".into()));
    }
    let mut rankings = Vec::new();
    let mut skipped = Vec::new();
    for &sel in navtypes {
        let nobs = t.nobs(sel);
        if nobs < settings.min_transitions.max(1) {
            skipped.push(Skipped { navtype: sel, nobs });
            continue;
        }
        rankings.push(fit_and_evaluate(ctx, t, sel, hops, settings)?.0);
    }
    Ok(DatasetRankings {
        dataset: dataset.to_owned(),
        rankings,
        skipped,
    })
}

/// Dataset x navigation type grid of winning models; `None` marks a type
/// that was not evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct WinnerMatrix {
    pub navtypes: Vec<NavSelector>,
    pub rows: Vec<(String, Vec<Option<ModelId>>)>,
}

pub fn winner_matrix(datasets: &[DatasetRankings], navtypes: &[NavSelector]) -> WinnerMatrix {
    let rows = datasets
        .iter()
        .map(|d| {
            let cells = navtypes
                .iter()
                .map(|&sel| d.ranking(sel).and_then(Ranking::winner))
                .collect();
            (d.dataset.clone(), cells)
        })
        .collect();
    WinnerMatrix {
        navtypes: navtypes.to_vec(),
        rows,
    }
}

impl WinnerMatrix {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "dataset")?;
        for sel in &self.navtypes {
            write!(w, "\t{sel}")?;
        }
        writeln!(w)?;
        for (name, cells) in &self.rows {
            write!(w, "{name}")?;
            for cell in cells {
                match cell {
                    Some(m) => write!(w, "\t{m}")?,
                    None => write!(w, "\t-")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Long table of every evaluation, in ranking order.
pub fn write_evaluations_tsv<W: Write>(mut w: W, datasets: &[DatasetRankings]) -> io::Result<()> {
    writeln!(w, "dataset\tnavtype\trank\tmodel\tloglik\tnparams\tnobs\tbic")?;
    for d in datasets {
        for r in &d.rankings {
            for (pos, e) in r.evaluations.iter().enumerate() {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    d.dataset,
                    r.navtype,
                    pos + 1,
                    e.model,
                    e.loglik,
                    e.nparams,
                    e.nobs,
                    e.bic
                )?;
            }
        }
    }
    Ok(())
}

/// Hex SHA-256 of a reader's content.
pub fn digest<R: Read>(mut r: R) -> io::Result<String> {
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

impl InputFile {
    pub fn from_path(path: &Path) -> io::Result<Self> {
        Ok(InputFile {
            path: path.display().to_string(),
            sha256: digest(std::fs::File::open(path)?)?,
        })
    }
}

/// Everything needed to reproduce a run. `created_unix` is the only field
/// that differs between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created_unix: u64,
    pub graph_hash: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub diameter: u32,
    pub inputs: BTreeMap<String, InputFile>,
    pub config: serde_json::Value,
    pub skipped: Vec<Skipped>,
}

impl RunManifest {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}
