use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use hoprank::clickstream::NavSelector;
use hoprank::models::{ModelContext, ModelId, ModelRecord};
use hoprank::simulator::{run_synth, SynthSpec};

use crate::error::{CliError, CliResult};
use crate::workdir::{prepare_output, read_text, write_json, WorkDir};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Synthetic experiment description (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the seed in the synth file.
    #[arg(long)]
    seed: Option<u64>,
    /// Work directory to create.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Serialize)]
struct SynthSummary<'a> {
    command: &'static str,
    spec: &'a SynthSpec,
    nodes: usize,
    edges: usize,
    diameter: u32,
    per_type: BTreeMap<String, u64>,
    planted: ModelId,
}

pub fn run(args: SynthArgs) -> CliResult<()> {
    let text = read_text(&args.spec)?;
    let mut spec = SynthSpec::from_toml_str(&text).map_err(CliError::data(args.spec.display()))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let out = run_synth(&spec).map_err(CliError::data("simulation"))?;

    prepare_output(&args.out, args.force)?;
    let work = WorkDir::new(&args.out);
    let (graph, transitions) = work.write_dataset(&out.graph, &out.transitions)?;
    let ctx = ModelContext::new(&out.graph, out.diameter).map_err(CliError::data("simulation"))?;
    let mut planted = ModelRecord::new(&out.planted, &ctx, NavSelector::All, transitions.nobs(NavSelector::All));
    planted.graph_hash = graph.hash().to_string();
    write_json(&work.data().join("planted.json"), &planted)?;
    let summary = SynthSummary {
        command: "synth",
        spec: &spec,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        diameter: out.diameter,
        per_type: NavSelector::EVERY
            .iter()
            .map(|&sel| (sel.to_string(), transitions.nobs(sel)))
            .collect(),
        planted: out.planted.id,
    };
    write_json(&work.data().join("summary.json"), &summary)?;
    eprintln!(
        "simulated {} transitions on {} nodes into {}",
        transitions.nobs(NavSelector::All),
        graph.node_count(),
        args.out.display()
    );
    Ok(())
}
