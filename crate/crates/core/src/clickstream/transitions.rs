use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use super::{NavSelector, NavType, Session};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphHash, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionEntry {
    pub source: NodeId,
    pub target: NodeId,
    pub nav: NavType,
    pub count: u64,
}

/// Sparse transition counts keyed by (source, target, navigation type), over
/// the ids of one graph. Entries are sorted by source, then target, then type,
/// so all entries of a source are contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSet {
    node_count: usize,
    graph_hash: GraphHash,
    entries: Vec<TransitionEntry>,
    totals: [u64; 7],
}

#[derive(Debug, Clone)]
pub struct TransitionSetBuilder {
    node_count: usize,
    graph_hash: GraphHash,
    counts: BTreeMap<(NodeId, NodeId, NavType), u64>,
}

impl TransitionSetBuilder {
    pub fn new(graph: &Graph) -> Self {
        TransitionSetBuilder {
            node_count: graph.node_count(),
            graph_hash: graph.hash(),
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, source: NodeId, target: NodeId, nav: NavType, count: u64) -> Result<()> {
        for id in [source, target] {
            if id as usize >= self.node_count {
                return Err(Error::NodeOutOfRange {
                    id,
                    node_count: self.node_count,
                });
            }
        }
        if count > 0 {
            *self.counts.entry((source, target, nav)).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn build(self) -> TransitionSet {
        let mut totals = [0u64; 7];
        let entries = self
            .counts
            .into_iter()
            .map(|((source, target, nav), count)| {
                totals[nav.index()] += count;
                TransitionEntry {
                    source,
                    target,
                    nav,
                    count,
                }
            })
            .collect();
        TransitionSet {
            node_count: self.node_count,
            graph_hash: self.graph_hash,
            entries,
            totals,
        }
    }
}

impl TransitionSet {
    pub fn builder(graph: &Graph) -> TransitionSetBuilder {
        TransitionSetBuilder::new(graph)
    }

    /// Convenience constructor from `(source, target, type, count)` tuples.
    pub fn from_counts(
        graph: &Graph,
        counts: impl IntoIterator<Item = (NodeId, NodeId, NavType, u64)>,
    ) -> Result<Self> {
        let mut b = Self::builder(graph);
        for (s, t, nav, c) in counts {
            b.add(s, t, nav, c)?;
        }
        Ok(b.build())
    }

    pub fn entries(&self) -> &[TransitionEntry] {
        &self.entries
    }

    pub fn iter(&self, sel: NavSelector) -> impl Iterator<Item = &TransitionEntry> + '_ {
        self.entries.iter().filter(move |e| sel.matches(e.nav))
    }

    pub fn nobs(&self, sel: NavSelector) -> u64 {
        match sel {
            NavSelector::All => self.totals.iter().sum(),
            NavSelector::Only(t) => self.totals[t.index()],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn graph_hash(&self) -> GraphHash {
        self.graph_hash
    }

    pub fn check_graph(&self, graph: &Graph) -> Result<()> {
        if graph.hash() == self.graph_hash && graph.node_count() == self.node_count {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// Distinct sources, ascending.
    pub fn sources(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.entries.iter().map(|e| e.source).collect();
        out.dedup();
        out
    }

    /// Sums counts of two sets over the same graph.
    pub fn merge(&self, other: &TransitionSet) -> Result<TransitionSet> {
        if self.graph_hash != other.graph_hash {
            return Err(Error::GraphMismatch);
        }
        let mut b = TransitionSetBuilder {
            node_count: self.node_count,
            graph_hash: self.graph_hash,
            counts: BTreeMap::new(),
        };
        for e in self.entries.iter().chain(&other.entries) {
            b.add(e.source, e.target, e.nav, e.count)?;
        }
        Ok(b.build())
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> TransitionSet {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.count *= factor;
        }
        for t in &mut out.totals {
            *t *= factor;
        }
        out
    }

    /// `src<TAB>dst<TAB>type<TAB>count`, one entry per line, for the selected
    /// types.
    pub fn write_tsv<W: Write>(&self, graph: &Graph, sel: NavSelector, mut w: W) -> Result<()> {
        self.check_graph(graph)?;
        writeln!(w, "# src\tdst\ttype\tcount")?;
        for e in self.iter(sel) {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                graph.label(e.source),
                graph.label(e.target),
                e.nav,
                e.count
            )?;
        }
        Ok(())
    }
}

/// Reads the format produced by [`TransitionSet::write_tsv`]; labels must
/// exist in `graph`. Repeated keys are summed.
pub fn read_transitions<R: BufRead>(reader: R, graph: &Graph) -> Result<TransitionSet> {
    let mut b = TransitionSet::builder(graph);
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::parse(lineno, "invalid UTF-8"),
            _ => Error::Io(e),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [src, dst, nav, count] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 4 tab-separated fields, found {}", fields.len())));
        };
        let lookup = |label: &str| {
            graph
                .id_of(label)
                .ok_or_else(|| Error::parse(lineno, format!("unknown node label {label:?}")))
        };
        let nav: NavType = nav
            .parse()
            .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad count {count:?}")))?;
        if count == 0 {
            return Err(Error::parse(lineno, "count must be positive"));
        }
        b.add(lookup(src)?, lookup(dst)?, nav, count)?;
    }
    Ok(b.build())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExtractConfig {
    pub drop_self_loops: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExtractStats {
    /// Consecutive request pairs seen.
    pub pairs: u64,
    /// Pairs kept as transitions.
    pub kept: u64,
    /// Pairs with an endpoint outside the graph.
    pub dropped_outside: u64,
    /// Pairs repeating the same concept, when self-loops are dropped.
    pub dropped_self_loops: u64,
}

/// Counts consecutive in-session pairs whose endpoints both belong to `lcc`.
/// A pair is labeled with the navigation type of its second request.
pub fn extract_transitions(
    sessions: &[Session],
    lcc: &Graph,
    config: &ExtractConfig,
) -> (TransitionSet, ExtractStats) {
    let mut b = TransitionSet::builder(lcc);
    let mut stats = ExtractStats::default();
    for s in sessions {
        for pair in s.steps.windows(2) {
            stats.pairs += 1;
            let (Some(src), Some(dst)) = (lcc.id_of(&pair[0].concept), lcc.id_of(&pair[1].concept)) else {
                stats.dropped_outside += 1;
                continue;
            };
            if src == dst && config.drop_self_loops {
                stats.dropped_self_loops += 1;
                continue;
            }
            b.add(src, dst, pair[1].nav, 1).expect("ids come from the graph");
            stats.kept += 1;
        }
    }
    (b.build(), stats)
}
