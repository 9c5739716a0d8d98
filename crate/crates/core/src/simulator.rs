//! Synthetic graphs and synthetic clickstreams drawn from the navigation
//! models, including HopRank's two-step walk.

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clickstream::{NavType, TransitionSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::khop::{bfs_profile, grav_denominator, SourceProfile};
use crate::models::{
    FittedModel, HopPortationVector, MarkovRow, MarkovRows, ModelConfig, ModelContext, ModelId, ModelParams,
};

/// Profiles kept in memory while walking; beyond this sources are re-profiled
/// on every visit.
const WALK_PROFILE_BUDGET: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Complete binary tree with `2^h - 1` nodes labeled `a, b, ..., z, aa, ...`
    /// in breadth-first order.
    BalancedBinaryTree,
    /// Uniform random labeled tree.
    RandomTree,
    /// Random spanning tree plus `extra_edges` uniformly drawn extra edges.
    ConnectedRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub nodes: usize,
    #[serde(default)]
    pub extra_edges: usize,
}

/// The model transitions are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedSpec {
    pub model: ModelId,
    /// HopRank vector `[beta_0, ..., beta_k]`; shorter vectors are zero-padded
    /// to the graph diameter.
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
    /// Damping factor for `rw-empirical`.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Distinct targets per row of a planted Markov chain.
    #[serde(default)]
    pub chain_out_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub graph: GraphSpec,
    pub planted: PlantedSpec,
    pub transitions: u64,
    pub seed: u64,
    #[serde(default = "default_session_length")]
    pub session_length: usize,
    #[serde(default = "default_navtypes")]
    pub navtypes: Vec<NavType>,
}

fn default_session_length() -> usize {
    10
}

fn default_navtypes() -> Vec<NavType> {
    vec![NavType::DC]
}

impl SynthSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: SynthSpec = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph.nodes < 2 {
            return Err(Error::UnsatisfiableSpec(format!(
                "graph needs at least 2 nodes, got {}",
                self.graph.nodes
            )));
        }
        if self.session_length == 0 {
            return Err(Error::UnsatisfiableSpec("session_length must be positive".into()));
        }
        if self.navtypes.is_empty() {
            return Err(Error::UnsatisfiableSpec("navtypes is empty".into()));
        }
        let p = &self.planted;
        match p.model {
            ModelId::HopRank if p.beta.is_none() => {
                return Err(Error::UnsatisfiableSpec("hoprank needs a beta vector".into()))
            }
            ModelId::HopRank => {}
            _ if p.beta.is_some() => {
                return Err(Error::UnsatisfiableSpec(format!("beta given for model {}", p.model)))
            }
            _ => {}
        }
        match (p.model, p.alpha) {
            (ModelId::EmpiricalPageRank, None) => {
                return Err(Error::UnsatisfiableSpec("rw-empirical needs alpha".into()))
            }
            (ModelId::EmpiricalPageRank, Some(a)) if !(0.0..=1.0).contains(&a) => return Err(Error::InvalidAlpha(a)),
            (ModelId::EmpiricalPageRank, Some(_)) | (_, None) => {}
            (m, Some(_)) => return Err(Error::UnsatisfiableSpec(format!("alpha given for model {m}"))),
        }
        if p.chain_out_degree.is_some() && p.model != ModelId::MarkovChain {
            return Err(Error::UnsatisfiableSpec("chain_out_degree is only used by mc".into()));
        }
        Ok(())
    }
}

/// Bijective base-26 label: 0 -> "a", 25 -> "z", 26 -> "aa".
pub fn alpha_label(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

pub fn balanced_binary_tree(nodes: usize) -> Result<Graph> {
    if nodes < 2 || !(nodes + 1).is_power_of_two() {
        return Err(Error::UnsatisfiableSpec(format!(
            "a balanced binary tree has 2^h - 1 nodes (h >= 2), got {nodes}"
        )));
    }
    let mut b = GraphBuilder::new();
    for i in 0..nodes {
        b.add_node(&alpha_label(i));
    }
    for child in 1..nodes {
        b.add_edge_ids(((child - 1) / 2) as NodeId, child as NodeId);
    }
    Ok(b.build())
}

/// Decodes a uniformly random Pruefer sequence into a labeled tree.
pub fn random_tree<R: Rng>(nodes: usize, rng: &mut R) -> Result<Vec<(NodeId, NodeId)>> {
    if nodes < 2 {
        return Err(Error::UnsatisfiableSpec(format!("a tree needs at least 2 nodes, got {nodes}")));
    }
    let seq: Vec<usize> = (0..nodes - 2).map(|_| rng.random_range(0..nodes)).collect();
    let mut degree = vec![1usize; nodes];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..nodes).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(nodes - 1);
    for &s in &seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf as NodeId, s as NodeId));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(u) = leaves.pop().expect("two leaves remain");
    let Reverse(v) = leaves.pop().expect("two leaves remain");
    edges.push((u as NodeId, v as NodeId));
    Ok(edges)
}

pub fn synth_graph(spec: &GraphSpec, seed: u64) -> Result<Graph> {
    let n = spec.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec.kind {
        GraphKind::BalancedBinaryTree => {
            if spec.extra_edges > 0 {
                return Err(Error::UnsatisfiableSpec("extra_edges on a balanced tree".into()));
            }
            balanced_binary_tree(n)
        }
        GraphKind::RandomTree => {
            if spec.extra_edges > 0 {
                return Err(Error::UnsatisfiableSpec("extra_edges on a tree".into()));
            }
            Ok(Graph::from_edge_pairs(n, random_tree(n, &mut rng)?))
        }
        GraphKind::ConnectedRandom => {
            let tree = random_tree(n, &mut rng)?;
            let max_extra = (n * (n - 1) / 2) - (n - 1);
            if spec.extra_edges > max_extra {
                return Err(Error::UnsatisfiableSpec(format!(
                    "{} extra edges requested, at most {max_extra} fit",
                    spec.extra_edges
                )));
            }
            let key = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
            let mut present: BTreeSet<(NodeId, NodeId)> = tree.iter().map(|&(a, b)| key(a, b)).collect();
            let mut edges = tree;
            while edges.len() < n - 1 + spec.extra_edges {
                let a = rng.random_range(0..n) as NodeId;
                let b = rng.random_range(0..n) as NodeId;
                if a != b && present.insert(key(a, b)) {
                    edges.push((a, b));
                }
            }
            Ok(Graph::from_edge_pairs(n, edges))
        }
    }
}

/// Restart cadence and type labels of simulated walks.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    /// The walker jumps to a uniform node after this many transitions.
    pub session_length: usize,
    /// Each transition gets one of these types, uniformly.
    pub navtypes: Vec<NavType>,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            session_length: default_session_length(),
            navtypes: default_navtypes(),
        }
    }
}

struct Walker<'a> {
    graph: &'a Graph,
    config: &'a WalkConfig,
    rng: ChaCha8Rng,
    current: NodeId,
    steps: usize,
    builder: crate::clickstream::TransitionSetBuilder,
}

impl<'a> Walker<'a> {
    fn new(graph: &'a Graph, config: &'a WalkConfig, seed: u64) -> Result<Self> {
        if graph.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if config.navtypes.is_empty() || config.session_length == 0 {
            return Err(Error::Config("walk needs a positive session length and at least one type".into()));
        }
        Ok(Walker {
            graph,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            current: 0,
            steps: 0,
            builder: TransitionSet::builder(graph),
        })
    }

    fn uniform_node(&mut self) -> NodeId {
        self.rng.random_range(0..self.graph.node_count()) as NodeId
    }

    /// Source of the next transition, restarting at session boundaries.
    fn source(&mut self) -> NodeId {
        if self.steps % self.config.session_length == 0 {
            self.current = self.uniform_node();
        }
        self.current
    }

    fn record(&mut self, target: NodeId) -> Result<()> {
        let nav = if self.config.navtypes.len() == 1 {
            self.config.navtypes[0]
        } else {
            self.config.navtypes[self.rng.random_range(0..self.config.navtypes.len())]
        };
        self.builder.add(self.current, target, nav, 1)?;
        self.current = target;
        self.steps += 1;
        Ok(())
    }
}

/// Memoizes BFS profiles of visited sources up to a memory budget.
struct Profiles<'a> {
    graph: &'a Graph,
    diameter: u32,
    cached: HashMap<NodeId, SourceProfile>,
    budget_left: usize,
}

impl<'a> Profiles<'a> {
    fn new(graph: &'a Graph, diameter: u32) -> Self {
        Profiles {
            graph,
            diameter,
            cached: HashMap::new(),
            budget_left: WALK_PROFILE_BUDGET,
        }
    }

    fn with<R>(&mut self, source: NodeId, f: impl FnOnce(&SourceProfile) -> R) -> Result<R> {
        if let Some(p) = self.cached.get(&source) {
            return Ok(f(p));
        }
        let p = bfs_profile(self.graph, source, self.diameter)?;
        let size = p.dist().len() * 2 + p.histogram().len() * 4;
        if size <= self.budget_left {
            self.budget_left -= size;
            Ok(f(self.cached.entry(source).or_insert(p)))
        } else {
            Ok(f(&p))
        }
    }
}

/// The `r`-th node (in id order) at distance exactly `k`.
fn nth_at_distance(profile: &SourceProfile, k: usize, r: u32) -> NodeId {
    profile
        .dist()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d as usize == k)
        .nth(r as usize)
        .map(|(j, _)| j as NodeId)
        .expect("rank within neighborhood size")
}

/// Two-step HopRank walk: draw `k` from the source's renormalized vector
/// (`beta_0` and every `beta_k` with a non-empty k-hop neighborhood), then a
/// uniform node of `N_k(i)`, or of all of `V` when `k = 0`.
pub fn simulate_hoprank(
    g: &Graph,
    beta: &HopPortationVector,
    n: u64,
    config: &WalkConfig,
    seed: u64,
) -> Result<TransitionSet> {
    let diameter = g.exact_diameter()?;
    let beta = beta.padded_to(diameter as usize)?;
    let mut walker = Walker::new(g, config, seed)?;
    let mut profiles = Profiles::new(g, diameter);
    for _ in 0..n {
        let i = walker.source();
        let draw = profiles.with(i, |p| {
            let weights: Vec<f64> = (0..=diameter as usize)
                .map(|k| {
                    if k == 0 || p.histogram()[k] > 0 {
                        beta.get(k)
                    } else {
                        0.0
                    }
                })
                .collect();
            match WeightedIndex::new(&weights) {
                Ok(dist) => {
                    let k = dist.sample(&mut walker.rng);
                    if k == 0 {
                        None
                    } else {
                        let r = walker.rng.random_range(0..p.histogram()[k]);
                        Some(nth_at_distance(p, k, r))
                    }
                }
                Err(_) => None,
            }
        })?;
        let j = match draw {
            Some(j) => j,
            None => walker.uniform_node(),
        };
        walker.record(j)?;
    }
    Ok(walker.builder.build())
}

/// Draws `n` transitions row by row from any fitted model.
pub fn simulate_baseline(
    ctx: &ModelContext<'_>,
    model: &FittedModel,
    n: u64,
    config: &WalkConfig,
    seed: u64,
) -> Result<TransitionSet> {
    let g = ctx.graph;
    match &model.params {
        ModelParams::HopRank(beta) => simulate_hoprank(g, beta, n, config, seed),
        ModelParams::PreferentialAttachment => {
            let degrees: Vec<usize> = (0..g.node_count() as NodeId).map(|v| g.degree_of(v)).collect();
            let mut walker = Walker::new(g, config, seed)?;
            let by_degree = WeightedIndex::new(&degrees).ok();
            for _ in 0..n {
                walker.source();
                let j = match &by_degree {
                    Some(d) => d.sample(&mut walker.rng) as NodeId,
                    None => walker.uniform_node(),
                };
                walker.record(j)?;
            }
            Ok(walker.builder.build())
        }
        ModelParams::RandomWalk { alpha } => {
            let mut walker = Walker::new(g, config, seed)?;
            for _ in 0..n {
                let i = walker.source();
                let nbrs = g.neighbors(i);
                let j = if !nbrs.is_empty() && walker.rng.random::<f64>() < *alpha {
                    nbrs[walker.rng.random_range(0..nbrs.len())]
                } else {
                    walker.uniform_node()
                };
                walker.record(j)?;
            }
            Ok(walker.builder.build())
        }
        ModelParams::MarkovChain(rows) => {
            let mut walker = Walker::new(g, config, seed)?;
            let samplers: HashMap<NodeId, WeightedIndex<u64>> = rows
                .rows()
                .iter()
                .map(|r| {
                    let w: Vec<u64> = r.targets.iter().map(|t| t.1).collect();
                    (r.source, WeightedIndex::new(w).expect("rows have positive totals"))
                })
                .collect();
            for _ in 0..n {
                let i = walker.source();
                let j = match (samplers.get(&i), rows.row(i)) {
                    (Some(s), Some(row)) => row.targets[s.sample(&mut walker.rng)].0,
                    _ => walker.uniform_node(),
                };
                walker.record(j)?;
            }
            Ok(walker.builder.build())
        }
        ModelParams::Gravitational => {
            let mut walker = Walker::new(g, config, seed)?;
            let mut profiles = Profiles::new(g, ctx.diameter as u32);
            let mut rows: HashMap<NodeId, WeightedIndex<f64>> = HashMap::new();
            for _ in 0..n {
                let i = walker.source();
                if !rows.contains_key(&i) {
                    let w = profiles.with(i, |p| {
                        p.dist()
                            .iter()
                            .enumerate()
                            .map(|(j, &h)| g.degree_of(j as NodeId) as f64 / grav_denominator(h, ctx.diameter))
                            .collect::<Vec<f64>>()
                    })?;
                    if let Ok(d) = WeightedIndex::new(w) {
                        rows.insert(i, d);
                    }
                }
                let j = match rows.get(&i) {
                    Some(d) => d.sample(&mut walker.rng) as NodeId,
                    None => walker.uniform_node(),
                };
                walker.record(j)?;
            }
            Ok(walker.builder.build())
        }
    }
}

/// A Markov chain in which every node moves to `out_degree` random targets
/// with random positive weights.
pub fn random_chain(g: &Graph, out_degree: usize, seed: u64) -> Result<MarkovRows> {
    let n = g.node_count();
    if out_degree == 0 || out_degree > n {
        return Err(Error::UnsatisfiableSpec(format!(
            "chain out-degree must be in 1..={n}, got {out_degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n as NodeId)
        .map(|source| {
            let targets: Vec<(NodeId, u64)> = rand::seq::index::sample(&mut rng, n, out_degree)
                .into_iter()
                .map(|j| (j as NodeId, rng.random_range(1..=10u64)))
                .collect();
            MarkovRow {
                source,
                total: 0,
                targets,
            }
        })
        .collect::<Vec<_>>();
    MarkovRows::from_rows(n, rows)
}

/// Builds the planted model of a spec on `g`.
pub fn planted_model(spec: &PlantedSpec, ctx: &ModelContext<'_>, seed: u64) -> Result<FittedModel> {
    let g = ctx.graph;
    let defaults = ModelConfig::default();
    let params = match spec.model {
        ModelId::HopRank => {
            let raw = spec
                .beta
                .clone()
                .ok_or_else(|| Error::UnsatisfiableSpec("hoprank needs a beta vector".into()))?;
            return FittedModel::hoprank(ctx, &HopPortationVector::new(raw)?);
        }
        ModelId::PreferentialAttachment => ModelParams::PreferentialAttachment,
        ModelId::Gravitational => ModelParams::Gravitational,
        ModelId::RandomJumps => ModelParams::RandomWalk { alpha: 0.0 },
        ModelId::LinksOnly => ModelParams::RandomWalk {
            alpha: defaults.links_alpha,
        },
        ModelId::PageRank => ModelParams::RandomWalk {
            alpha: defaults.pagerank_alpha,
        },
        ModelId::EmpiricalPageRank => ModelParams::RandomWalk {
            alpha: spec.alpha.ok_or_else(|| Error::UnsatisfiableSpec("rw-empirical needs alpha".into()))?,
        },
        ModelId::MarkovChain => ModelParams::MarkovChain(random_chain(g, spec.chain_out_degree.unwrap_or(2), seed)?),
    };
    Ok(FittedModel {
        id: spec.model,
        params,
        nparams: crate::models::nparams(spec.model, g.node_count(), ctx.diameter as usize),
    })
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub graph: Graph,
    pub diameter: u32,
    pub planted: FittedModel,
    pub transitions: TransitionSet,
}

/// Graph from `seed`, planted model and walk from seeds derived from it.
pub fn run_synth(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let graph = synth_graph(&spec.graph, spec.seed)?;
    let diameter = graph.exact_diameter()?;
    let ctx = ModelContext::new(&graph, diameter)?;
    let planted = planted_model(&spec.planted, &ctx, spec.seed.wrapping_add(1))?;
    let config = WalkConfig {
        session_length: spec.session_length,
        navtypes: spec.navtypes.clone(),
    };
    let transitions = simulate_baseline(&ctx, &planted, spec.transitions, &config, spec.seed.wrapping_add(2))?;
    Ok(SynthOutput {
        graph,
        diameter,
        planted,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clickstream::NavSelector;
    use crate::khop::{ProfileCache, TransitionHops};
    use crate::models::{fit_hopportation, hoprank_prob};

    #[test]
    fn labels_are_bijective_base_26() {
        assert_eq!(alpha_label(0), "a");
        assert_eq!(alpha_label(25), "z");
        assert_eq!(alpha_label(26), "aa");
        assert_eq!(alpha_label(27), "ab");
        assert_eq!(alpha_label(26 + 26 * 26), "aaa");
    }

    #[test]
    fn balanced_tree_of_seven_matches_toy() {
        let g = balanced_binary_tree(7).unwrap();
        assert_eq!(g.exact_diameter().unwrap(), 4);
        let degrees: Vec<usize> = (0..7).map(|v| g.degree(v).unwrap()).collect();
        assert_eq!(degrees, vec![2, 3, 3, 1, 1, 1, 1]);
        assert_eq!(g.hash(), crate::graph::tests::toy_tree().hash());
        assert!(balanced_binary_tree(6).is_err());
        assert!(balanced_binary_tree(1).is_err());
    }

    #[test]
    fn random_graphs_are_connected_and_deterministic() {
        for kind in [GraphKind::RandomTree, GraphKind::ConnectedRandom] {
            let spec = GraphSpec {
                kind,
                nodes: 1000,
                extra_edges: if kind == GraphKind::RandomTree { 0 } else { 300 },
            };
            let a = synth_graph(&spec, 9).unwrap();
            let b = synth_graph(&spec, 9).unwrap();
            assert_eq!(a.hash(), b.hash());
            assert_ne!(a.hash(), synth_graph(&spec, 10).unwrap().hash());
            assert_eq!(a.connected_components().sizes.len(), 1);
            assert_eq!(a.edge_count(), 999 + spec.extra_edges);
        }
        let tiny = GraphSpec {
            kind: GraphKind::RandomTree,
            nodes: 1,
            extra_edges: 0,
        };
        assert!(synth_graph(&tiny, 0).is_err());
        let full = GraphSpec {
            kind: GraphKind::ConnectedRandom,
            nodes: 4,
            extra_edges: 4,
        };
        assert!(synth_graph(&full, 0).is_err());
    }

    #[test]
    fn edge_only_vector_walks_along_edges() {
        let g = synth_graph(
            &GraphSpec {
                kind: GraphKind::ConnectedRandom,
                nodes: 40,
                extra_edges: 20,
            },
            3,
        )
        .unwrap();
        let d = g.exact_diameter().unwrap() as usize;
        let mut beta = vec![0.0; d + 1];
        beta[1] = 1.0;
        let beta = HopPortationVector::new(beta).unwrap();
        let t = simulate_hoprank(&g, &beta, 5000, &WalkConfig::default(), 1).unwrap();
        assert_eq!(t.nobs(NavSelector::All), 5000);
        assert!(t.entries().iter().all(|e| g.has_edge(e.source, e.target)));
        assert_eq!(t, simulate_hoprank(&g, &beta, 5000, &WalkConfig::default(), 1).unwrap());
    }

    #[test]
    fn empirical_frequencies_approach_hoprank_rows() {
        let g = balanced_binary_tree(15).unwrap();
        let d = g.exact_diameter().unwrap();
        let beta = HopPortationVector::new(vec![0.1, 0.2, 0.3, 0.1, 0.1, 0.1, 0.1]).unwrap();
        let cfg = WalkConfig {
            session_length: 1,
            navtypes: vec![NavType::DC],
        };
        let tv = |n: u64| {
            let t = simulate_hoprank(&g, &beta, n, &cfg, 5).unwrap();
            let mut total = 0.0;
            for i in 0..15u32 {
                let row_n: u64 = t.entries().iter().filter(|e| e.source == i).map(|e| e.count).sum();
                let p = bfs_profile(&g, i, d).unwrap();
                let mut dist = 0.0;
                for j in 0..15u32 {
                    let c: u64 = t
                        .entries()
                        .iter()
                        .filter(|e| e.source == i && e.target == j)
                        .map(|e| e.count)
                        .sum();
                    dist += (c as f64 / row_n as f64 - hoprank_prob(i, j, &beta, &p)).abs();
                }
                total += dist / 2.0;
            }
            total / 15.0
        };
        let coarse = tv(3_000);
        let fine = tv(300_000);
        assert!(fine < coarse, "{fine} vs {coarse}");
        assert!(fine < 0.02, "{fine}");
    }

    #[test]
    fn planted_beta_is_recovered() {
        let g = synth_graph(
            &GraphSpec {
                kind: GraphKind::RandomTree,
                nodes: 300,
                extra_edges: 0,
            },
            4,
        )
        .unwrap();
        let d = g.exact_diameter().unwrap();
        let beta = HopPortationVector::new(vec![0.0, 0.2, 0.5, 0.1, 0.2]).unwrap();
        let t = simulate_hoprank(&g, &beta, 20_000, &WalkConfig::default(), 11).unwrap();
        let cache = ProfileCache::new(&g, d, 0).unwrap();
        let hops = TransitionHops::build(&g, &t, &cache).unwrap();
        let fitted = fit_hopportation(&t, NavSelector::All, &hops).unwrap();
        let planted = beta.padded_to(d as usize).unwrap();
        let l1: f64 = fitted.beta().iter().zip(planted.beta()).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 < 0.05, "{l1}");
    }

    #[test]
    fn baselines_follow_their_definitions() {
        let g = balanced_binary_tree(7).unwrap();
        let ctx = ModelContext::new(&g, 4).unwrap();
        let cfg = WalkConfig::default();
        let pa = FittedModel {
            id: ModelId::PreferentialAttachment,
            params: ModelParams::PreferentialAttachment,
            nparams: 0,
        };
        let t = simulate_baseline(&ctx, &pa, 60_000, &cfg, 2).unwrap();
        for v in 0..7u32 {
            let c: u64 = t.entries().iter().filter(|e| e.target == v).map(|e| e.count).sum();
            let expect = g.degree(v).unwrap() as f64 / 12.0;
            assert!((c as f64 / 60_000.0 - expect).abs() < 0.01);
        }
        let jumps = FittedModel {
            id: ModelId::RandomJumps,
            params: ModelParams::RandomWalk { alpha: 0.0 },
            nparams: 0,
        };
        let t = simulate_baseline(&ctx, &jumps, 70_000, &cfg, 2).unwrap();
        // chi-square with 6 degrees of freedom, 0.999 quantile is 22.46
        let chi2: f64 = (0..7u32)
            .map(|v| {
                let c: u64 = t.entries().iter().filter(|e| e.target == v).map(|e| e.count).sum();
                (c as f64 - 10_000.0).powi(2) / 10_000.0
            })
            .sum();
        assert!(chi2 < 22.46, "{chi2}");
    }

    #[test]
    fn spec_parsing_and_validation() {
        let spec = SynthSpec::from_toml_str(
            r#"
            transitions = 500
            seed = 3
            [graph]
            kind = "balanced_binary_tree"
            nodes = 7
            [planted]
            model = "hoprank"
            beta = [0.0, 0.2, 0.5, 0.1, 0.2]
            "#,
        )
        .unwrap();
        let out = run_synth(&spec).unwrap();
        assert_eq!(out.diameter, 4);
        assert_eq!(out.transitions.nobs(NavSelector::All), 500);
        assert_eq!(out.transitions, run_synth(&spec).unwrap().transitions);

        let bad = [
            "transitions = 1\nseed = 1\n[graph]\nkind = \"random_tree\"\nnodes = 1\n[planted]\nmodel = \"pa\"",
            "transitions = 1\nseed = 1\n[graph]\nkind = \"random_tree\"\nnodes = 5\n[planted]\nmodel = \"hoprank\"",
            "transitions = 1\nseed = 1\n[graph]\nkind = \"random_tree\"\nnodes = 5\n[planted]\nmodel = \"pa\"\nalpha = 0.3",
            "transitions = 1\nseed = 1\nbogus = 2\n[graph]\nkind = \"random_tree\"\nnodes = 5\n[planted]\nmodel = \"pa\"",
        ];
        for b in bad {
            assert!(SynthSpec::from_toml_str(b).is_err(), "{b}");
        }
        let long = SynthSpec::from_toml_str(
            "transitions = 1\nseed = 1\n[graph]\nkind = \"balanced_binary_tree\"\nnodes = 3\n[planted]\nmodel = \"hoprank\"\nbeta = [0.2, 0.2, 0.2, 0.4]",
        )
        .unwrap();
        assert!(run_synth(&long).is_err());
    }
}
