use std::collections::BTreeMap;

use crate::clickstream::{NavSelector, TransitionSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Upper end of the damping-factor search interval.
pub const ALPHA_MAX: f64 = 1.0 - 1e-9;
const TOLERANCE: f64 = 1e-6;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Transition counts reduced to what the random-walk likelihood depends on:
/// on-edge weight per source degree, and the off-edge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct RwSufficientStats {
    pub node_count: usize,
    pub on_edge: BTreeMap<usize, u64>,
    pub off_edge: u64,
}

impl RwSufficientStats {
    pub fn collect(g: &Graph, t: &TransitionSet, sel: NavSelector) -> Result<Self> {
        t.check_graph(g)?;
        let mut on_edge = BTreeMap::new();
        let mut off_edge = 0;
        for e in t.iter(sel) {
            if g.has_edge(e.source, e.target) {
                *on_edge.entry(g.degree_of(e.source)).or_insert(0) += e.count;
            } else {
                off_edge += e.count;
            }
        }
        Ok(RwSufficientStats {
            node_count: g.node_count(),
            on_edge,
            off_edge,
        })
    }

    pub fn nobs(&self) -> u64 {
        self.off_edge + self.on_edge.values().sum::<u64>()
    }

    /// Log-likelihood of the random walk with damping `alpha`.
    pub fn loglik(&self, alpha: f64) -> f64 {
        let n = self.node_count as f64;
        let jump = (1.0 - alpha) / n;
        let mut ll = 0.0;
        for (&deg, &w) in &self.on_edge {
            ll += w as f64 * (alpha / deg as f64 + jump).ln();
        }
        if self.off_edge > 0 {
            ll += self.off_edge as f64 * jump.ln();
        }
        ll
    }

    fn derivative(&self, alpha: f64) -> f64 {
        let n = self.node_count as f64;
        let jump = (1.0 - alpha) / n;
        let mut d = 0.0;
        for (&deg, &w) in &self.on_edge {
            let inv = 1.0 / deg as f64;
            d += w as f64 * (inv - 1.0 / n) / (alpha * inv + jump);
        }
        d - self.off_edge as f64 / (1.0 - alpha)
    }
}

/// Maximum-likelihood damping factor on `[0, 1 - 1e-9]`.
///
/// The likelihood is concave in `alpha`, so the endpoints are settled from
/// the sign of the derivative and the interior optimum is found by
/// golden-section search to within `1e-6`.
pub fn fit_alpha(g: &Graph, t: &TransitionSet, sel: NavSelector) -> Result<f64> {
    let stats = RwSufficientStats::collect(g, t, sel)?;
    if stats.nobs() == 0 {
        return Err(Error::NoTransitions(sel));
    }
    Ok(maximize(&stats))
}

pub(crate) fn maximize(stats: &RwSufficientStats) -> f64 {
    if stats.derivative(0.0) <= 0.0 {
        return 0.0;
    }
    if stats.off_edge == 0 || stats.derivative(ALPHA_MAX) >= 0.0 {
        return ALPHA_MAX;
    }
    let (mut lo, mut hi) = (0.0, ALPHA_MAX);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = stats.loglik(x1);
    let mut f2 = stats.loglik(x2);
    while hi - lo > TOLERANCE {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = stats.loglik(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = stats.loglik(x1);
        }
    }
    0.5 * (lo + hi)
}
