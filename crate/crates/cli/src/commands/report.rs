use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;

use hoprank::clickstream::NavSelector;
use hoprank::selection::{winner_matrix, write_evaluations_tsv, DatasetRankings};

use crate::error::{CliError, CliResult};
use crate::workdir::{prepare_output, read_json, read_text, write_with, WorkDir};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Ranked work directory; repeat for several datasets.
    #[arg(long = "work", required = true)]
    works: Vec<PathBuf>,
    /// Directory for the combined tables.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

/// Data rows of a tab-separated file whose first line is `header`.
fn body_rows(path: &Path, header: &str) -> CliResult<Vec<String>> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(CliError::Input(format!("{}: expected header {header:?}", path.display())));
    }
    Ok(lines.filter(|l| !l.is_empty()).map(str::to_owned).collect())
}

pub fn run(args: ReportArgs) -> CliResult<()> {
    let mut datasets: Vec<DatasetRankings> = Vec::new();
    let mut names = BTreeSet::new();
    let mut navtype_rows = Vec::new();
    let mut beta_rows = Vec::new();
    let mut wins_per_type = Vec::new();
    for dir in &args.works {
        let work = WorkDir::new(dir);
        let path = work.rank().join("rankings.json");
        if !path.is_file() {
            return Err(CliError::Input(format!("{} is missing; run `rank` first", path.display())));
        }
        let d: DatasetRankings = read_json(&path)?;
        if !names.insert(d.dataset.clone()) {
            return Err(CliError::Usage(format!(
                "dataset name {:?} appears twice; rerun `rank` with distinct --dataset names",
                d.dataset
            )));
        }
        for row in body_rows(&work.data().join("navtypes.tsv"), "navtype\ttransitions\tshare")? {
            navtype_rows.push(format!("{}\t{row}", d.dataset));
        }
        let beta = work.fit().join("beta.tsv");
        if beta.is_file() {
            for row in body_rows(&beta, "navtype\tk\tbeta")? {
                beta_rows.push(format!("{}\t{row}", d.dataset));
            }
        }
        for r in &d.rankings {
            if let Some(m) = r.winner() {
                wins_per_type.push((r.navtype, m));
            }
        }
        datasets.push(d);
    }

    prepare_output(&args.out, args.force)?;
    write_with(&args.out.join("evaluations.tsv"), |w| Ok(write_evaluations_tsv(w, &datasets)?))?;
    write_with(&args.out.join("winners.tsv"), |w| {
        Ok(winner_matrix(&datasets, &NavSelector::EVERY).write_tsv(w)?)
    })?;
    write_with(&args.out.join("navtypes.tsv"), |w| {
        writeln!(w, "dataset\tnavtype\ttransitions\tshare")?;
        for row in &navtype_rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    write_with(&args.out.join("beta.tsv"), |w| {
        writeln!(w, "dataset\tnavtype\tk\tbeta")?;
        for row in &beta_rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    write_with(&args.out.join("wins.tsv"), |w| {
        writeln!(w, "navtype\tmodel\twins\tdatasets")?;
        for sel in NavSelector::EVERY {
            let here: Vec<_> = wins_per_type.iter().filter(|(s, _)| *s == sel).map(|&(_, m)| m).collect();
            let mut models: Vec<_> = here.clone();
            models.sort_by_key(|m| m.key());
            models.dedup();
            for m in models {
                let wins = here.iter().filter(|&&x| x == m).count();
                writeln!(w, "{sel}\t{m}\t{wins}\t{}", here.len())?;
            }
        }
        Ok(())
    })?;
    eprintln!("report over {} datasets written to {}", datasets.len(), args.out.display());
    Ok(())
}
