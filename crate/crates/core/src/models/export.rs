use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{nparams, FittedModel, HopPortationVector, MarkovRow, MarkovRows, ModelContext, ModelId, ModelParams};
use crate::clickstream::NavSelector;
use crate::error::{Error, Result};

/// Serialized form of a fitted model, keyed to the graph it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub model: ModelId,
    pub navtype: String,
    pub graph_hash: String,
    pub node_count: usize,
    pub diameter: u32,
    pub nobs: u64,
    pub nparams: u64,
    pub params: ParamsRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamsRecord {
    HopRank { beta: HopPortationVector },
    None,
    RandomWalk { alpha: f64 },
    MarkovChain { rows: Vec<ChainRowRecord> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainRowRecord {
    pub source: String,
    pub targets: Vec<(String, u64)>,
}

impl ModelRecord {
    pub fn new(model: &FittedModel, ctx: &ModelContext<'_>, sel: NavSelector, nobs: u64) -> Self {
        let g = ctx.graph;
        let params = match &model.params {
            ModelParams::HopRank(beta) => ParamsRecord::HopRank { beta: beta.clone() },
            ModelParams::PreferentialAttachment | ModelParams::Gravitational => ParamsRecord::None,
            ModelParams::RandomWalk { alpha } => ParamsRecord::RandomWalk { alpha: *alpha },
            ModelParams::MarkovChain(rows) => ParamsRecord::MarkovChain {
                rows: rows
                    .rows()
                    .iter()
                    .map(|r| ChainRowRecord {
                        source: g.label(r.source).to_owned(),
                        targets: r.targets.iter().map(|&(j, c)| (g.label(j).to_owned(), c)).collect(),
                    })
                    .collect(),
            },
        };
        ModelRecord {
            model: model.id,
            navtype: sel.to_string(),
            graph_hash: g.hash().to_string(),
            node_count: g.node_count(),
            diameter: ctx.diameter as u32,
            nobs,
            nparams: model.nparams,
            params,
        }
    }

    /// Restores the model against `ctx`, which must be the graph it was
    /// fitted on.
    pub fn to_model(&self, ctx: &ModelContext<'_>) -> Result<FittedModel> {
        let g = ctx.graph;
        if self.graph_hash != g.hash().to_string() || self.node_count != g.node_count() {
            return Err(Error::GraphMismatch);
        }
        if self.diameter != ctx.diameter as u32 {
            return Err(Error::DiameterMismatch {
                found: self.diameter,
                diameter: ctx.diameter as u32,
            });
        }
        let mismatch = || Error::Config(format!("parameters do not match model {}", self.model));
        let params = match (&self.params, self.model) {
            (ParamsRecord::HopRank { beta }, ModelId::HopRank) => {
                ModelParams::HopRank(beta.padded_to(ctx.diameter as usize)?)
            }
            (ParamsRecord::None, ModelId::PreferentialAttachment) => ModelParams::PreferentialAttachment,
            (ParamsRecord::None, ModelId::Gravitational) => ModelParams::Gravitational,
            (
                ParamsRecord::RandomWalk { alpha },
                ModelId::RandomJumps | ModelId::LinksOnly | ModelId::PageRank | ModelId::EmpiricalPageRank,
            ) => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(Error::InvalidAlpha(*alpha));
                }
                ModelParams::RandomWalk { alpha: *alpha }
            }
            (ParamsRecord::MarkovChain { rows }, ModelId::MarkovChain) => {
                let lookup = |label: &str| g.id_of(label).ok_or_else(|| Error::UnknownLabel(label.to_owned()));
                let rows = rows
                    .iter()
                    .map(|r| {
                        Ok(MarkovRow {
                            source: lookup(&r.source)?,
                            total: 0,
                            targets: r
                                .targets
                                .iter()
                                .map(|(l, c)| Ok((lookup(l)?, *c)))
                                .collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ModelParams::MarkovChain(MarkovRows::from_rows(g.node_count(), rows)?)
            }
            _ => return Err(mismatch()),
        };
        Ok(FittedModel {
            id: self.model,
            params,
            nparams: nparams(self.model, g.node_count(), ctx.diameter as usize),
        })
    }
}

pub fn write_model_json<W: Write>(record: &ModelRecord, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, record)?;
    Ok(())
}

pub fn read_model_json<R: Read>(r: R) -> Result<ModelRecord> {
    Ok(serde_json::from_reader(r)?)
}

/// Long-format table of HopPortation vectors, one `navtype k beta_k` row per
/// hop, ready for a heatmap.
pub fn write_beta_rows<'a, W: Write>(
    mut w: W,
    rows: impl IntoIterator<Item = (NavSelector, &'a HopPortationVector)>,
) -> Result<()> {
    writeln!(w, "navtype\tk\tbeta")?;
    for (sel, beta) in rows {
        for (k, b) in beta.beta().iter().enumerate() {
            writeln!(w, "{sel}\t{k}\t{b}")?;
        }
    }
    Ok(())
}
