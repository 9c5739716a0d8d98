use crate::graph::{Graph, NodeId};
use crate::khop::{grav_denominator, Hop, SourceProfile, SourceSummary};

/// Preferential attachment: `deg(j) / 2|E|`, independent of the source.
pub fn pa_prob(g: &Graph, j: NodeId) -> f64 {
    let total = g.total_degree();
    if total == 0 {
        return 1.0 / g.node_count() as f64;
    }
    g.degree_of(j) as f64 / total as f64
}

#[inline]
pub(crate) fn grav_mass(g: &Graph, j: NodeId, hop: Hop, summary: &SourceSummary, diameter: Hop) -> f64 {
    if summary.grav_normalizer <= 0.0 {
        return 1.0 / g.node_count() as f64;
    }
    g.degree_of(j) as f64 / grav_denominator(hop, diameter) / summary.grav_normalizer
}

/// Gravitational model: `deg(j) / S(i, j)` normalized over the row, with
/// `S` the squared shortest-path distance.
pub fn grav_prob(g: &Graph, i: NodeId, j: NodeId, profile: &SourceProfile) -> f64 {
    debug_assert_eq!(i, profile.source());
    grav_mass(g, j, profile.hop_to(j), profile.summary(), profile.diameter())
}

/// Random walk with teleportation: follow a uniformly chosen link with
/// probability `alpha`, otherwise jump anywhere.
pub fn rw_prob(g: &Graph, i: NodeId, j: NodeId, alpha: f64) -> f64 {
    let n = g.node_count() as f64;
    let deg = g.degree_of(i);
    let follow = if deg == 0 {
        1.0 / n
    } else if g.has_edge(i, j) {
        1.0 / deg as f64
    } else {
        0.0
    };
    alpha * follow + (1.0 - alpha) / n
}
