use crate::clickstream::{NavSelector, TransitionSet};
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Sparse first-order Markov chain: observed rows hold normalized counts,
/// every unobserved row is uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovRows {
    node_count: usize,
    rows: Vec<MarkovRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovRow {
    pub source: NodeId,
    pub total: u64,
    /// Sorted by target.
    pub targets: Vec<(NodeId, u64)>,
}

impl MarkovRows {
    pub fn fit(t: &TransitionSet, sel: NavSelector) -> Result<Self> {
        let mut rows: Vec<MarkovRow> = Vec::new();
        for e in t.iter(sel) {
            match rows.last_mut() {
                Some(row) if row.source == e.source => {
                    row.total += e.count;
                    match row.targets.last_mut() {
                        Some(last) if last.0 == e.target => last.1 += e.count,
                        _ => row.targets.push((e.target, e.count)),
                    }
                }
                _ => rows.push(MarkovRow {
                    source: e.source,
                    total: e.count,
                    targets: vec![(e.target, e.count)],
                }),
            }
        }
        if rows.is_empty() {
            return Err(Error::NoTransitions(sel));
        }
        Ok(MarkovRows {
            node_count: t.node_count(),
            rows,
        })
    }

    /// Rebuilds a chain from explicit rows; rows are sorted and targets merged.
    pub fn from_rows(node_count: usize, rows: impl IntoIterator<Item = MarkovRow>) -> Result<Self> {
        let mut rows: Vec<MarkovRow> = rows.into_iter().collect();
        rows.sort_by_key(|r| r.source);
        for w in rows.windows(2) {
            if w[0].source == w[1].source {
                return Err(Error::Config(format!("duplicate chain row for node {}", w[0].source)));
            }
        }
        for row in &mut rows {
            row.targets.sort_by_key(|t| t.0);
            row.targets.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            row.targets.retain(|t| t.1 > 0);
            row.total = row.targets.iter().map(|t| t.1).sum();
            for &(id, _) in std::iter::once(&(row.source, 0)).chain(&row.targets) {
                if id as usize >= node_count {
                    return Err(Error::NodeOutOfRange { id, node_count });
                }
            }
        }
        rows.retain(|r| r.total > 0);
        Ok(MarkovRows { node_count, rows })
    }

    pub fn rows(&self) -> &[MarkovRow] {
        &self.rows
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn row(&self, i: NodeId) -> Option<&MarkovRow> {
        self.rows
            .binary_search_by_key(&i, |r| r.source)
            .ok()
            .map(|idx| &self.rows[idx])
    }

    pub fn prob(&self, i: NodeId, j: NodeId) -> f64 {
        match self.row(i) {
            None => 1.0 / self.node_count as f64,
            Some(row) => match row.targets.binary_search_by_key(&j, |t| t.0) {
                Ok(idx) => row.targets[idx].1 as f64 / row.total as f64,
                Err(_) => 0.0,
            },
        }
    }
}
