//! Navigation models over a connected graph: HopRank and its baselines.

mod alpha;
mod baselines;
mod export;
mod hoprank;
mod markov;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use alpha::{fit_alpha, RwSufficientStats, ALPHA_MAX};
pub use baselines::{grav_prob, pa_prob, rw_prob};
pub use export::{read_model_json, write_beta_rows, write_model_json, ModelRecord, ParamsRecord};
pub use hoprank::{fit_hopportation, hop_counts, hoprank_prob, HopPortationVector};
pub use markov::{MarkovRow, MarkovRows};

use crate::clickstream::{NavSelector, TransitionSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::khop::{Hop, SourceProfile, SourceSummary, TransitionHops};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ModelId {
    HopRank,
    PreferentialAttachment,
    Gravitational,
    RandomJumps,
    LinksOnly,
    PageRank,
    EmpiricalPageRank,
    MarkovChain,
}

impl ModelId {
    /// Every model, in the order used to break ranking ties.
    pub const ALL: [ModelId; 8] = [
        ModelId::HopRank,
        ModelId::PreferentialAttachment,
        ModelId::Gravitational,
        ModelId::RandomJumps,
        ModelId::LinksOnly,
        ModelId::PageRank,
        ModelId::EmpiricalPageRank,
        ModelId::MarkovChain,
    ];

    /// Machine-readable key used in files and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            ModelId::HopRank => "hoprank",
            ModelId::PreferentialAttachment => "pa",
            ModelId::Gravitational => "gravitational",
            ModelId::RandomJumps => "rw-0",
            ModelId::LinksOnly => "rw-1",
            ModelId::PageRank => "rw-0.85",
            ModelId::EmpiricalPageRank => "rw-empirical",
            ModelId::MarkovChain => "mc",
        }
    }

    /// Short label for tables.
    pub fn label(self) -> &'static str {
        match self {
            ModelId::HopRank => "HopRank",
            ModelId::PreferentialAttachment => "PA",
            ModelId::Gravitational => "Gr",
            ModelId::RandomJumps => "RW 0.0",
            ModelId::LinksOnly => "RW 1.0",
            ModelId::PageRank => "RW 0.85",
            ModelId::EmpiricalPageRank => "RW E.",
            ModelId::MarkovChain => "MC",
        }
    }

    pub(crate) fn order(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ModelId::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

impl From<ModelId> for String {
    fn from(m: ModelId) -> String {
        m.key().to_owned()
    }
}

impl TryFrom<String> for ModelId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Number of free parameters of a model over `n` nodes and diameter `d`.
pub fn nparams(id: ModelId, node_count: usize, diameter: usize) -> u64 {
    match id {
        ModelId::HopRank => diameter as u64 + 1,
        ModelId::EmpiricalPageRank => 1,
        ModelId::MarkovChain => {
            let n = node_count as u64;
            n.saturating_mul(n.saturating_sub(2))
        }
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Damping of the "links only" walk; kept below one so that off-link
    /// transitions keep a finite likelihood.
    pub links_alpha: f64,
    pub pagerank_alpha: f64,
    /// Optional additive smoothing `p' = (p + eps) / (1 + N eps)`.
    pub smoothing: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            links_alpha: 1.0 - 1e-6,
            pagerank_alpha: 0.85,
            smoothing: None,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for a in [self.links_alpha, self.pagerank_alpha] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidAlpha(a));
            }
        }
        match self.smoothing {
            Some(eps) if !(eps.is_finite() && eps >= 0.0) => {
                Err(Error::Config(format!("smoothing must be non-negative, got {eps}")))
            }
            _ => Ok(()),
        }
    }
}

/// The graph a model is evaluated on, with its exact diameter.
#[derive(Debug, Clone, Copy)]
pub struct ModelContext<'g> {
    pub graph: &'g Graph,
    pub diameter: Hop,
}

impl<'g> ModelContext<'g> {
    pub fn new(graph: &'g Graph, diameter: u32) -> Result<Self> {
        Ok(ModelContext {
            graph,
            diameter: crate::khop::check_diameter(diameter)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    HopRank(HopPortationVector),
    PreferentialAttachment,
    Gravitational,
    RandomWalk { alpha: f64 },
    MarkovChain(MarkovRows),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub id: ModelId,
    pub params: ModelParams,
    pub nparams: u64,
}

impl FittedModel {
    /// A HopRank model with a given vector, zero-padded to the diameter.
    pub fn hoprank(ctx: &ModelContext<'_>, beta: &HopPortationVector) -> Result<Self> {
        let d = ctx.diameter as usize;
        Ok(FittedModel {
            id: ModelId::HopRank,
            params: ModelParams::HopRank(beta.padded_to(d)?),
            nparams: nparams(ModelId::HopRank, ctx.graph.node_count(), d),
        })
    }

    /// `P(i -> j)` given the BFS profile of `i`.
    pub fn prob(&self, ctx: &ModelContext<'_>, i: NodeId, j: NodeId, profile: &SourceProfile) -> f64 {
        debug_assert_eq!(i, profile.source());
        self.entry_prob(ctx, i, j, profile.hop_to(j), profile.summary())
    }

    #[inline]
    pub(crate) fn entry_prob(&self, ctx: &ModelContext<'_>, i: NodeId, j: NodeId, hop: Hop, summary: &SourceSummary) -> f64 {
        let g = ctx.graph;
        match &self.params {
            ModelParams::HopRank(beta) => beta.mass(hop, summary, g.node_count()),
            ModelParams::PreferentialAttachment => pa_prob(g, j),
            ModelParams::Gravitational => baselines::grav_mass(g, j, hop, summary, ctx.diameter),
            ModelParams::RandomWalk { alpha } => rw_prob(g, i, j, *alpha),
            ModelParams::MarkovChain(rows) => rows.prob(i, j),
        }
    }

    pub fn beta(&self) -> Option<&HopPortationVector> {
        match &self.params {
            ModelParams::HopRank(b) => Some(b),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.params {
            ModelParams::RandomWalk { alpha } => Some(alpha),
            _ => None,
        }
    }
}

/// Fits one model on the transitions of the selected type.
pub fn fit_model(
    id: ModelId,
    ctx: &ModelContext<'_>,
    t: &TransitionSet,
    sel: NavSelector,
    hops: &TransitionHops,
    config: &ModelConfig,
) -> Result<FittedModel> {
    config.validate()?;
    t.check_graph(ctx.graph)?;
    hops.check(t)?;
    if hops.diameter() != ctx.diameter {
        return Err(Error::DiameterMismatch {
            found: hops.diameter() as u32,
            diameter: ctx.diameter as u32,
        });
    }
    if t.nobs(sel) == 0 {
        return Err(Error::NoTransitions(sel));
    }
    let params = match id {
        ModelId::HopRank => ModelParams::HopRank(fit_hopportation(t, sel, hops)?),
        ModelId::PreferentialAttachment => ModelParams::PreferentialAttachment,
        ModelId::Gravitational => ModelParams::Gravitational,
        ModelId::RandomJumps => ModelParams::RandomWalk { alpha: 0.0 },
        ModelId::LinksOnly => ModelParams::RandomWalk {
            alpha: config.links_alpha,
        },
        ModelId::PageRank => ModelParams::RandomWalk {
            alpha: config.pagerank_alpha,
        },
        ModelId::EmpiricalPageRank => ModelParams::RandomWalk {
            alpha: fit_alpha(ctx.graph, t, sel)?,
        },
        ModelId::MarkovChain => ModelParams::MarkovChain(MarkovRows::fit(t, sel)?),
    };
    Ok(FittedModel {
        id,
        params,
        nparams: nparams(id, ctx.graph.node_count(), ctx.diameter as usize),
    })
}

/// Log-likelihood of the selected transitions under `model`.
///
/// Sums are taken per source and then combined in source order, so the
/// result does not depend on the thread count. Any observed transition with
/// zero probability makes the result `-inf`.
pub fn loglik(
    model: &FittedModel,
    ctx: &ModelContext<'_>,
    t: &TransitionSet,
    sel: NavSelector,
    hops: &TransitionHops,
    smoothing: Option<f64>,
) -> Result<f64> {
    t.check_graph(ctx.graph)?;
    hops.check(t)?;
    let n = ctx.graph.node_count() as f64;
    let entries = t.entries();
    let partials: Vec<f64> = hops
        .groups()
        .par_iter()
        .map(|grp| {
            let mut ll = 0.0;
            for idx in grp.entries.clone() {
                let e = &entries[idx];
                if !sel.matches(e.nav) {
                    continue;
                }
                let mut p = model.entry_prob(ctx, e.source, e.target, hops.hop(idx), &grp.summary);
                if let Some(eps) = smoothing {
                    p = (p + eps) / (1.0 + n * eps);
                }
                if p <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                ll += e.count as f64 * p.ln();
            }
            ll
        })
        .collect();
    Ok(partials.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clickstream::NavType;
    use crate::graph::tests::toy_tree;
    use crate::khop::{bfs_profile, ProfileCache};

    fn setup(g: &Graph, counts: &[(u32, u32, u64)]) -> (TransitionSet, TransitionHops, u32) {
        let d = g.exact_diameter().unwrap();
        let t = TransitionSet::from_counts(g, counts.iter().map(|&(s, t, c)| (s, t, NavType::DC, c))).unwrap();
        let cache = ProfileCache::new(g, d, 0).unwrap();
        let hops = TransitionHops::build(g, &t, &cache).unwrap();
        (t, hops, d)
    }

    #[test]
    fn model_keys_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.key().parse::<ModelId>().unwrap(), m);
        }
        assert!("nope".parse::<ModelId>().is_err());
        assert_eq!(ModelId::ALL.iter().map(|m| m.order()).collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(nparams(ModelId::HopRank, 1000, 31), 32);
        assert_eq!(nparams(ModelId::HopRank, 7, 4), 5);
        assert_eq!(nparams(ModelId::MarkovChain, 7, 4), 35);
        assert_eq!(nparams(ModelId::EmpiricalPageRank, 7, 4), 1);
        for m in [
            ModelId::PreferentialAttachment,
            ModelId::Gravitational,
            ModelId::RandomJumps,
            ModelId::LinksOnly,
            ModelId::PageRank,
        ] {
            assert_eq!(nparams(m, 7, 4), 0);
        }
    }

    #[test]
    fn loglik_of_two_half_probability_transitions() {
        let g = toy_tree();
        let (t, hops, d) = setup(&g, &[(0, 1, 1), (0, 2, 1)]);
        let ctx = ModelContext::new(&g, d).unwrap();
        let mc = fit_model(ModelId::MarkovChain, &ctx, &t, NavSelector::All, &hops, &ModelConfig::default()).unwrap();
        let ll = loglik(&mc, &ctx, &t, NavSelector::All, &hops, None).unwrap();
        assert!((ll - 2.0 * 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_gives_negative_infinity() {
        let g = Graph::from_labeled_edges([("x", "y"), ("y", "z")]);
        let (t, hops, d) = setup(&g, &[(0, 1, 1), (1, 1, 1)]);
        let ctx = ModelContext::new(&g, d).unwrap();
        let beta = HopPortationVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        let m = FittedModel::hoprank(&ctx, &beta).unwrap();
        let ll = loglik(&m, &ctx, &t, NavSelector::All, &hops, None).unwrap();
        assert_eq!(ll, f64::NEG_INFINITY);
        let smoothed = loglik(&m, &ctx, &t, NavSelector::All, &hops, Some(1e-3)).unwrap();
        assert!(smoothed.is_finite());
    }

    #[test]
    fn prob_matches_entry_prob_for_every_model() {
        let g = toy_tree();
        let (t, hops, d) = setup(&g, &[(0, 1, 3), (3, 4, 2), (3, 6, 1), (5, 5, 1)]);
        let ctx = ModelContext::new(&g, d).unwrap();
        for id in ModelId::ALL {
            let m = fit_model(id, &ctx, &t, NavSelector::All, &hops, &ModelConfig::default()).unwrap();
            for i in 0..7 {
                let p = bfs_profile(&g, i, d).unwrap();
                let row: f64 = (0..7).map(|j| m.prob(&ctx, i, j, &p)).sum();
                assert!((row - 1.0).abs() < 1e-12, "{id} row {i} sums to {row}");
            }
        }
    }

    #[test]
    fn fitting_requires_observations() {
        let g = toy_tree();
        let (t, hops, d) = setup(&g, &[(0, 1, 3)]);
        let ctx = ModelContext::new(&g, d).unwrap();
        let err = fit_model(ModelId::PageRank, &ctx, &t, NavSelector::Only(NavType::ES), &hops, &ModelConfig::default());
        assert!(matches!(err, Err(Error::NoTransitions(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_case() -> impl Strategy<Value = (Graph, Vec<(u32, u32, u64)>)> {
            (3usize..14)
                .prop_flat_map(|n| {
                    let tree = proptest::collection::vec(any::<u32>(), n - 1);
                    let extra = proptest::collection::vec((0..n as u32, 0..n as u32), 0..n);
                    let trans = proptest::collection::vec((0..n as u32, 0..n as u32, 1u64..5), 1..30);
                    (Just(n), tree, extra, trans)
                })
                .prop_map(|(n, tree, extra, trans)| {
                    let mut edges: Vec<(u32, u32)> =
                        tree.iter().enumerate().map(|(i, r)| ((i + 1) as u32, r % (i as u32 + 1))).collect();
                    edges.extend(extra);
                    (Graph::from_edge_pairs(n, edges), trans)
                })
        }

        proptest! {
            #[test]
            fn rows_are_stochastic((g, trans) in arb_case()) {
                let (t, hops, d) = setup(&g, &trans);
                let ctx = ModelContext::new(&g, d).unwrap();
                for id in ModelId::ALL {
                    let m = fit_model(id, &ctx, &t, NavSelector::All, &hops, &ModelConfig::default()).unwrap();
                    for i in 0..g.node_count() as u32 {
                        let p = bfs_profile(&g, i, d).unwrap();
                        let row: Vec<f64> = (0..g.node_count() as u32).map(|j| m.prob(&ctx, i, j, &p)).collect();
                        prop_assert!(row.iter().all(|&x| x >= 0.0));
                        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn scaling_counts_preserves_estimates((g, trans) in arb_case(), c in 2u64..6) {
                let (t, hops, d) = setup(&g, &trans);
                let scaled = t.scaled(c);
                let ctx = ModelContext::new(&g, d).unwrap();
                let cfg = ModelConfig::default();
                for id in [ModelId::HopRank, ModelId::EmpiricalPageRank, ModelId::MarkovChain] {
                    let a = fit_model(id, &ctx, &t, NavSelector::All, &hops, &cfg).unwrap();
                    let b = fit_model(id, &ctx, &scaled, NavSelector::All, &hops, &cfg).unwrap();
                    match (&a.params, &b.params) {
                        (ModelParams::HopRank(x), ModelParams::HopRank(y)) => {
                            for (p, q) in x.beta().iter().zip(y.beta()) {
                                prop_assert!((p - q).abs() < 1e-15);
                            }
                        }
                        (ModelParams::RandomWalk { alpha: x }, ModelParams::RandomWalk { alpha: y }) => {
                            prop_assert!((x - y).abs() < 1e-5);
                        }
                        (ModelParams::MarkovChain(x), ModelParams::MarkovChain(y)) => {
                            for e in t.entries() {
                                prop_assert!((x.prob(e.source, e.target) - y.prob(e.source, e.target)).abs() < 1e-15);
                            }
                        }
                        _ => prop_assert!(false),
                    }
                    let la = loglik(&a, &ctx, &t, NavSelector::All, &hops, None).unwrap();
                    let lb = loglik(&b, &ctx, &scaled, NavSelector::All, &hops, None).unwrap();
                    if la.is_finite() {
                        prop_assert!((lb - c as f64 * la).abs() <= 1e-9 * lb.abs().max(1.0));
                    }
                }
            }
        }
    }
}
