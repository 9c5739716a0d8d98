//! On-disk layout shared by the subcommands.
//!
//! ```text
//! WORK/data/graph.tsv             largest connected component, one edge per line
//! WORK/data/ids.tsv               dense id of every node label
//! WORK/data/transitions/<T>.tsv   transition counts per navigation type
//! WORK/data/summary.json          ingest or synth summary
//! WORK/data/planted.json          generating model (synth only)
//! WORK/data/navtypes.tsv          transitions per navigation type
//! WORK/fit/fit.json               fit settings, diameter, skipped types
//! WORK/fit/models/<T>/<m>.json    one fitted model per type and model
//! WORK/fit/beta.tsv               HopPortation vectors, long format
//! WORK/fit/alpha.tsv              fitted damping factors
//! WORK/rank/evaluations.tsv       every evaluation, best first
//! WORK/rank/winners.tsv           winning model per type
//! WORK/rank/rankings.json         rankings for `report`
//! WORK/rank/manifest.json         inputs, settings and graph hash of the run
//! ```

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use hoprank::clickstream::{read_transitions, NavSelector, NavType, TransitionSet};
use hoprank::graph::{load_edge_list, Delimiter, EdgeListFormat};
use hoprank::Graph;

use crate::error::{CliError, CliResult};

pub struct WorkDir {
    root: PathBuf,
}

impl WorkDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        WorkDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Dataset name used when none is given: the directory name.
    pub fn default_name(&self) -> String {
        fs::canonicalize(&self.root)
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "dataset".into())
    }

    pub fn data(&self) -> PathBuf {
        self.root.join("data")
    }

    pub fn fit(&self) -> PathBuf {
        self.root.join("fit")
    }

    pub fn rank(&self) -> PathBuf {
        self.root.join("rank")
    }

    pub fn graph_path(&self) -> PathBuf {
        self.data().join("graph.tsv")
    }

    pub fn transitions_dir(&self) -> PathBuf {
        self.data().join("transitions")
    }

    pub fn model_path(&self, sel: NavSelector, model: hoprank::models::ModelId) -> PathBuf {
        self.fit().join("models").join(sel.to_string()).join(format!("{model}.json"))
    }

    pub fn load_graph(&self) -> CliResult<Graph> {
        let path = self.graph_path();
        let file = File::open(&path).map_err(CliError::io(&path))?;
        let format = EdgeListFormat {
            delimiter: Delimiter::Char('\t'),
            header: false,
        };
        load_edge_list(BufReader::new(file), format).map_err(CliError::data(path.display()))
    }

    /// Sums every per-type transition file.
    pub fn load_transitions(&self, g: &Graph) -> CliResult<TransitionSet> {
        let mut total = TransitionSet::builder(g).build();
        for nav in NavType::ALL {
            let path = self.transitions_dir().join(format!("{nav}.tsv"));
            if !path.exists() {
                continue;
            }
            let file = File::open(&path).map_err(CliError::io(&path))?;
            let part = read_transitions(BufReader::new(file), g).map_err(CliError::data(path.display()))?;
            total = total.merge(&part).map_err(CliError::data(path.display()))?;
        }
        Ok(total)
    }

    /// Writes the graph, its id map and one transition file per type. Ids
    /// are those of the graph as read back from `graph.tsv`, which is
    /// returned together with the transitions relabeled onto it.
    pub fn write_dataset(&self, original: &Graph, t: &TransitionSet) -> CliResult<(Graph, TransitionSet)> {
        write_with(&self.graph_path(), |w| original.write_edge_list(w))?;
        let graph = self.load_graph()?;
        if graph.node_count() != original.node_count() || graph.edge_count() != original.edge_count() {
            return Err(CliError::Input(format!(
                "{} does not read back as the graph written; labels must not contain tabs or start with '#'",
                self.graph_path().display()
            )));
        }
        let mut b = TransitionSet::builder(&graph);
        let id = |v| {
            let label = original.label(v);
            graph
                .id_of(label)
                .ok_or_else(|| CliError::Input(format!("label {label:?} does not survive the edge-list round trip")))
        };
        for e in t.entries() {
            b.add(id(e.source)?, id(e.target)?, e.nav, e.count)
                .map_err(CliError::data("relabeling transitions"))?;
        }
        let transitions = b.build();
        let (g, t) = (&graph, &transitions);
        write_with(&self.data().join("ids.tsv"), |w| {
            writeln!(w, "id\tlabel")?;
            for (id, label) in g.labels().iter().enumerate() {
                writeln!(w, "{id}\t{label}")?;
            }
            Ok(())
        })?;
        let dir = self.transitions_dir();
        fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        for nav in NavType::ALL {
            write_with(&dir.join(format!("{nav}.tsv")), |w| t.write_tsv(g, NavSelector::Only(nav), w))?;
        }
        write_with(&self.data().join("navtypes.tsv"), |w| {
            let total = t.nobs(NavSelector::All);
            writeln!(w, "navtype\ttransitions\tshare")?;
            for nav in NavType::ALL {
                let n = t.nobs(NavSelector::Only(nav));
                let share = if total == 0 { 0.0 } else { n as f64 / total as f64 };
                writeln!(w, "{nav}\t{n}\t{share}")?;
            }
            Ok(())
        })?;
        Ok((graph, transitions))
    }
}

/// Makes `dir` an empty directory. An existing non-empty directory is only
/// replaced with `force`.
pub fn prepare_output(dir: &Path, force: bool) -> CliResult<()> {
    if dir.exists() {
        let occupied = fs::read_dir(dir).map_err(CliError::io(dir))?.next().is_some();
        if occupied {
            if !force {
                return Err(CliError::Usage(format!(
                    "{} already exists; pass --force to overwrite",
                    dir.display()
                )));
            }
            fs::remove_dir_all(dir).map_err(CliError::io(dir))?;
        }
    }
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> hoprank::Result<()>) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| match e {
        hoprank::Error::Io(source) => CliError::Io {
            path: path.to_owned(),
            source,
        },
        other => CliError::data(path.display())(other),
    })?;
    w.flush().map_err(CliError::io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(CliError::io(path))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupied_directories_need_force() {
        let tmp = tempfile::TempDir::new().unwrap();
        let dir = tmp.path().join("out");
        prepare_output(&dir, false).unwrap();
        prepare_output(&dir, false).unwrap();
        fs::write(dir.join("stale"), "x").unwrap();
        assert_eq!(prepare_output(&dir, false).unwrap_err().exit_code(), 1);
        prepare_output(&dir, true).unwrap();
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 0);
    }

    #[test]
    fn dataset_round_trips_through_disk() {
        let tmp = tempfile::TempDir::new().unwrap();
        let work = WorkDir::new(tmp.path());
        let g = Graph::from_labeled_edges([("root", "x"), ("root", "y"), ("y", "z")]);
        let id = |l| g.id_of(l).unwrap();
        let mut b = TransitionSet::builder(&g);
        b.add(id("x"), id("z"), NavType::DC, 3).unwrap();
        b.add(id("z"), id("z"), NavType::EX, 1).unwrap();
        let t = b.build();
        let (g2, t2) = work.write_dataset(&g, &t).unwrap();
        assert_eq!(work.load_graph().unwrap().hash(), g2.hash());
        assert_eq!(work.load_transitions(&g2).unwrap(), t2);
        assert_eq!(t2.nobs(NavSelector::All), 4);
        let e = t2.iter(NavSelector::Only(NavType::DC)).next().unwrap();
        assert_eq!((g2.label(e.source), g2.label(e.target), e.count), ("x", "z", 3));
    }

    #[test]
    fn malformed_json_is_an_input_error() {
        let tmp = tempfile::TempDir::new().unwrap();
        let path = tmp.path().join("bad.json");
        fs::write(&path, "{").unwrap();
        let err = read_json::<serde_json::Value>(&path).unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
    }
}
