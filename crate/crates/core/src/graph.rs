//! Undirected simple graphs: loading, component extraction and exact diameter.
//!
//! Nodes carry external string labels and dense internal ids `0..N` assigned in
//! first-seen order. Adjacency is stored in compressed sparse row form with every
//! neighbor list sorted, so the structure is immutable and cheap to share across
//! threads once built.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Field separator of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Any run of spaces or tabs.
    #[default]
    Whitespace,
    Char(char),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeListFormat {
    pub delimiter: Delimiter,
    /// Skip the first non-comment line.
    pub header: bool,
}

/// SHA-256 over node labels in id order and the adjacency structure.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphHash(pub [u8; 32]);

impl fmt::Display for GraphHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GraphHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphHash({self})")
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    edge_count: usize,
    hash: GraphHash,
}

/// Accumulates labeled edges; duplicates, reversed duplicates and self-edges are
/// resolved when [`GraphBuilder::build`] is called.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        let a = self.add_node(a);
        let b = self.add_node(b);
        self.add_edge_ids(a, b);
    }

    /// Both ids must already have been returned by [`GraphBuilder::add_node`].
    pub fn add_edge_ids(&mut self, a: NodeId, b: NodeId) {
        if a != b {
            self.edges.push((a.min(b), a.max(b)));
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn build(mut self) -> Graph {
        self.edges.sort_unstable();
        self.edges.dedup();
        let n = self.labels.len();
        let mut degree = vec![0usize; n];
        for &(a, b) in &self.edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; offsets[n]];
        for &(a, b) in &self.edges {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let hash = content_hash(&self.labels, &offsets, &neighbors);
        Graph {
            labels: self.labels,
            index: self.index,
            offsets,
            neighbors,
            edge_count: self.edges.len(),
            hash,
        }
    }
}

fn content_hash(labels: &[String], offsets: &[usize], neighbors: &[NodeId]) -> GraphHash {
    let mut hasher = Sha256::new();
    hasher.update((labels.len() as u64).to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    for &o in offsets {
        hasher.update((o as u64).to_le_bytes());
    }
    for &v in neighbors {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    GraphHash(out)
}

/// Per-node component labels of a graph.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    /// Component id of every node. Components are numbered in order of their
    /// smallest member id.
    pub component: Vec<u32>,
    pub sizes: Vec<usize>,
    /// Largest component; ties go to the one with the smallest member id.
    pub largest: usize,
}

impl Graph {
    /// Builds a graph from labeled pairs.
    pub fn from_labeled_edges<'a>(edges: impl IntoIterator<Item = (&'a str, &'a str)>) -> Graph {
        let mut b = GraphBuilder::new();
        for (x, y) in edges {
            b.add_edge(x, y);
        }
        b.build()
    }

    /// Builds a graph over `n` nodes labeled `"0".."n-1"`.
    pub fn from_edge_pairs(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        for (x, y) in edges {
            assert!((x as usize) < n && (y as usize) < n, "edge ({x}, {y}) out of range");
            b.add_edge_ids(x, y);
        }
        b.build()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id_of(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn hash(&self) -> GraphHash {
        self.hash
    }

    pub fn check_node(&self, id: NodeId) -> Result<()> {
        if (id as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                id,
                node_count: self.node_count(),
            })
        }
    }

    /// Sorted neighbor list. Panics on an out-of-range id.
    #[inline]
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        let i = id as usize;
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, id: NodeId) -> Result<usize> {
        self.check_node(id)?;
        Ok(self.degree_of(id))
    }

    #[inline]
    pub(crate) fn degree_of(&self, id: NodeId) -> usize {
        let i = id as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sum of all degrees, `2 * edge_count`.
    pub fn total_degree(&self) -> usize {
        2 * self.edge_count
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Edges as `(low id, high id)` pairs in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub fn connected_components(&self) -> ComponentMap {
        let n = self.node_count();
        let mut component = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component[start] != u32::MAX {
                continue;
            }
            let cid = sizes.len() as u32;
            component[start] = cid;
            queue.push_back(start as NodeId);
            let mut size = 0;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in self.neighbors(v) {
                    if component[w as usize] == u32::MAX {
                        component[w as usize] = cid;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        // first maximum wins, i.e. the component holding the smallest id
        let largest = sizes
            .iter()
            .enumerate()
            .fold((0, 0), |best, (c, &s)| if s > best.1 { (c, s) } else { best })
            .0;
        ComponentMap {
            component,
            sizes,
            largest,
        }
    }

    /// Subgraph induced by the largest connected component, together with the
    /// mapping from old ids to new ids (`None` for dropped nodes). Relative id
    /// order is preserved.
    pub fn largest_connected_component(&self) -> Result<(Graph, Vec<Option<NodeId>>)> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let comps = self.connected_components();
        let keep = comps.largest as u32;
        let mut mapping = vec![None; self.node_count()];
        let mut b = GraphBuilder::new();
        for (old, label) in self.labels.iter().enumerate() {
            if comps.component[old] == keep {
                mapping[old] = Some(b.add_node(label));
            }
        }
        for (x, y) in self.edges() {
            if let (Some(a), Some(c)) = (mapping[x as usize], mapping[y as usize]) {
                b.add_edge_ids(a, c);
            }
        }
        Ok((b.build(), mapping))
    }

    /// Writes one edge per line as `low<TAB>high`, with labels ordered
    /// lexicographically within each edge and edges sorted. Isolated nodes
    /// have no line and are lost on reading back.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        let mut rows: Vec<(&str, &str)> = self
            .edges()
            .map(|(a, b)| {
                let (x, y) = (self.label(a), self.label(b));
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        rows.sort_unstable();
        for (x, y) in rows {
            writeln!(w, "{x}\t{y}")?;
        }
        Ok(())
    }

    /// Exact diameter (maximum eccentricity) of a connected graph.
    ///
    /// A double sweep picks a central start vertex `u`; BFS levels of `u` are
    /// then processed from the outermost inwards, computing eccentricities of
    /// each fringe level until the lower bound exceeds twice the next level
    /// (iFUB). Fringe eccentricities are computed in parallel.
    pub fn exact_diameter(&self) -> Result<u32> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let comps = self.connected_components();
        if comps.sizes.len() > 1 {
            return Err(Error::Disconnected {
                components: comps.sizes.len(),
            });
        }
        if n == 1 {
            return Ok(0);
        }

        let mut scratch = BfsScratch::new(n);
        let hub = (0..n as NodeId).max_by_key(|&v| (self.degree_of(v), std::cmp::Reverse(v))).unwrap();
        let (_, a) = scratch.run(self, hub, false);
        let (ecc_a, b) = scratch.run(self, a, true);
        let mut lower = ecc_a;

        // walk half way back from b towards a
        let mut u = b;
        for _ in 0..ecc_a / 2 {
            u = scratch.parent[u as usize];
        }
        let (ecc_u, _) = scratch.run(self, u, false);
        let mut fringe_levels: Vec<Vec<NodeId>> = vec![Vec::new(); ecc_u as usize + 1];
        for v in 0..n {
            fringe_levels[scratch.dist[v] as usize].push(v as NodeId);
        }
        drop(scratch);

        lower = lower.max(ecc_u);
        let mut level = ecc_u;
        let mut upper = 2 * ecc_u;
        while upper > lower {
            let fringe_max = fringe_levels[level as usize]
                .par_iter()
                .map_init(|| BfsScratch::new(n), |s, &v| s.run(self, v, false).0)
                .max()
                .unwrap_or(0);
            lower = lower.max(fringe_max);
            if level == 0 || lower > 2 * (level - 1) {
                return Ok(lower);
            }
            upper = 2 * (level - 1);
            level -= 1;
        }
        Ok(lower)
    }
}

struct BfsScratch {
    dist: Vec<u32>,
    parent: Vec<NodeId>,
    queue: Vec<NodeId>,
}

impl BfsScratch {
    fn new(n: usize) -> Self {
        BfsScratch {
            dist: vec![u32::MAX; n],
            parent: vec![0; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Returns (eccentricity, a farthest vertex with the smallest id among the last level).
    fn run(&mut self, g: &Graph, source: NodeId, track_parents: bool) -> (u32, NodeId) {
        self.dist.fill(u32::MAX);
        self.queue.clear();
        self.dist[source as usize] = 0;
        self.queue.push(source);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            let dv = self.dist[v as usize];
            for &w in g.neighbors(v) {
                if self.dist[w as usize] == u32::MAX {
                    self.dist[w as usize] = dv + 1;
                    if track_parents {
                        self.parent[w as usize] = v;
                    }
                    self.queue.push(w);
                }
            }
        }
        let last = *self.queue.last().unwrap();
        (self.dist[last as usize], last)
    }
}

/// Reads an edge list: one edge per line, two label fields, `#` comments and
/// blank lines ignored. Node ids follow first appearance.
pub fn load_edge_list<R: BufRead>(reader: R, format: EdgeListFormat) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    let mut header_pending = format.header;
    let mut records = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::parse(lineno, "invalid UTF-8"),
            _ => Error::Io(e),
        })?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields: Vec<&str> = match format.delimiter {
            Delimiter::Whitespace => trimmed.split_whitespace().collect(),
            Delimiter::Char(c) => trimmed.split(c).map(str::trim).collect(),
        };
        if fields.len() != 2 {
            return Err(Error::parse(
                lineno,
                format!("expected 2 label fields, found {}", fields.len()),
            ));
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(lineno, "empty label field"));
        }
        b.add_edge(fields[0], fields[1]);
        records += 1;
    }
    if records == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(b.build())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn toy_tree() -> Graph {
        load_edge_list(
            "a b\na c\nb d\nb e\nc f\nc g\n".as_bytes(),
            EdgeListFormat::default(),
        )
        .unwrap()
    }

    fn brute_diameter(g: &Graph) -> u32 {
        let mut s = BfsScratch::new(g.node_count());
        (0..g.node_count() as NodeId)
            .map(|v| s.run(g, v, false).0)
            .max()
            .unwrap()
    }

    #[test]
    fn toy_tree_shape() {
        let g = toy_tree();
        assert_eq!(g.node_count(), 7);
        assert_eq!(g.edge_count(), 6);
        let b = g.id_of("b").unwrap();
        assert_eq!(g.degree(b).unwrap(), 3);
        assert_eq!(g.degree(g.id_of("d").unwrap()).unwrap(), 1);
        assert_eq!(g.exact_diameter().unwrap(), 4);
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let g = load_edge_list("x y\ny x\nx y\n".as_bytes(), EdgeListFormat::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn malformed_record_reports_line() {
        let err = load_edge_list("x\n".as_bytes(), EdgeListFormat::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err =
            load_edge_list("# c\na b\na b c\n".as_bytes(), EdgeListFormat::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            load_edge_list("# only comments\n\n".as_bytes(), EdgeListFormat::default()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn header_and_custom_delimiter() {
        let fmt = EdgeListFormat {
            delimiter: Delimiter::Char(','),
            header: true,
        };
        let g = load_edge_list("src,dst\nfoo bar,baz\n".as_bytes(), fmt).unwrap();
        assert_eq!(g.id_of("foo bar"), Some(0));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_edges_are_dropped() {
        let g = load_edge_list("a a\na b\n".as_bytes(), EdgeListFormat::default()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(0).unwrap(), 1);
    }

    #[test]
    fn degree_out_of_range() {
        let g = toy_tree();
        assert!(matches!(g.degree(7), Err(Error::NodeOutOfRange { id: 7, .. })));
        let single = GraphBuilder {
            labels: vec!["solo".into()],
            index: [("solo".to_string(), 0)].into_iter().collect(),
            edges: vec![],
        }
        .build();
        assert_eq!(single.degree(0).unwrap(), 0);
        assert_eq!(single.exact_diameter().unwrap(), 0);
    }

    #[test]
    fn lcc_picks_largest_component() {
        let g = Graph::from_labeled_edges([("a", "b"), ("b", "c"), ("d", "e")]);
        let (lcc, map) = g.largest_connected_component().unwrap();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 2);
        assert_eq!(map, vec![Some(0), Some(1), Some(2), None, None]);
        assert_eq!(lcc.exact_diameter().unwrap(), 2);
    }

    #[test]
    fn lcc_tie_breaks_on_smallest_id() {
        let g = Graph::from_edge_pairs(4, [(2, 3), (0, 1)]);
        let (lcc, map) = g.largest_connected_component().unwrap();
        assert_eq!(lcc.labels(), &["0".to_string(), "1".to_string()]);
        assert_eq!(map, vec![Some(0), Some(1), None, None]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = toy_tree();
        let (lcc, map) = g.largest_connected_component().unwrap();
        assert_eq!(lcc.hash(), g.hash());
        assert!(map.iter().enumerate().all(|(i, m)| *m == Some(i as u32)));
    }

    #[test]
    fn lcc_of_empty_graph_errors() {
        let g = GraphBuilder::new().build();
        assert!(matches!(g.largest_connected_component(), Err(Error::EmptyGraph)));
        assert!(matches!(g.exact_diameter(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn diameter_rejects_disconnected() {
        let g = Graph::from_edge_pairs(4, [(0, 1), (2, 3)]);
        assert!(matches!(
            g.exact_diameter(),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn diameter_of_path_and_cycle() {
        let path = Graph::from_edge_pairs(5, (0..4).map(|i| (i, i + 1)));
        assert_eq!(path.exact_diameter().unwrap(), 4);
        let cycle = Graph::from_edge_pairs(9, (0..9).map(|i| (i, (i + 1) % 9)));
        assert_eq!(cycle.exact_diameter().unwrap(), 4);
        assert_eq!(brute_diameter(&cycle), 4);
    }

    #[test]
    fn export_is_canonical() {
        let g = Graph::from_labeled_edges([("z", "b"), ("a", "z"), ("b", "a")]);
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a\tb\na\tz\nb\tz\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = Graph> {
            (1usize..60).prop_flat_map(|n| {
                proptest::collection::vec((0..n as u32, 0..n as u32), 0..3 * n)
                    .prop_map(move |e| Graph::from_edge_pairs(n, e))
            })
        }

        proptest! {
            #[test]
            fn degree_sum_is_twice_edges(g in arb_graph()) {
                let sum: usize = (0..g.node_count() as u32).map(|v| g.degree(v).unwrap()).sum();
                prop_assert_eq!(sum, 2 * g.edge_count());
                for v in 0..g.node_count() as u32 {
                    for &w in g.neighbors(v) {
                        prop_assert!(g.has_edge(w, v));
                        prop_assert_ne!(w, v);
                    }
                }
            }

            #[test]
            fn lcc_is_idempotent(g in arb_graph()) {
                let (lcc, _) = g.largest_connected_component().unwrap();
                let (again, map) = lcc.largest_connected_component().unwrap();
                prop_assert_eq!(again.hash(), lcc.hash());
                prop_assert!(map.iter().all(Option::is_some));
                let max = *g.connected_components().sizes.iter().max().unwrap();
                prop_assert_eq!(lcc.node_count(), max);
            }

            #[test]
            fn diameter_matches_all_pairs(g in arb_graph()) {
                let (lcc, _) = g.largest_connected_component().unwrap();
                prop_assert_eq!(lcc.exact_diameter().unwrap(), brute_diameter(&lcc));
            }
        }
    }
}
