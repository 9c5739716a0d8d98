use serde::{Deserialize, Serialize};

use crate::clickstream::{NavSelector, TransitionSet};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::khop::{Hop, SourceProfile, SourceSummary, TransitionHops, UNREACHABLE};

/// Probabilities of jumping into each k-hop neighborhood, `k = 0..=d'`.
/// `beta[0]` is the uniform teleportation (and self-loop) mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HopPortationVector {
    beta: Vec<f64>,
}

const SIMPLEX_TOLERANCE: f64 = 1e-12;

impl HopPortationVector {
    /// Takes `[beta_0, beta_1, ..., beta_d']`. Entries must be finite and
    /// non-negative and sum to one within `1e-12`.
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidBeta("empty vector".into()));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(Error::InvalidBeta(format!("entry {b} is not a probability")));
        }
        let total: f64 = beta.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidBeta(format!("entries sum to {total}")));
        }
        Ok(HopPortationVector { beta })
    }

    /// Builds the vector from `beta_1..beta_d'`, with `beta_0` taking the
    /// remaining mass.
    pub fn from_hops(hops: &[f64]) -> Result<Self> {
        let rest: f64 = hops.iter().sum();
        let mut beta = Vec::with_capacity(hops.len() + 1);
        beta.push((1.0 - rest).max(0.0));
        beta.extend_from_slice(hops);
        Self::new(beta)
    }

    /// Pure teleportation over a graph of diameter `d`.
    pub fn uniform_noise(d: usize) -> Self {
        let mut beta = vec![0.0; d + 1];
        beta[0] = 1.0;
        HopPortationVector { beta }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `d'`, the largest hop carried.
    pub fn diameter(&self) -> usize {
        self.beta.len() - 1
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.beta.get(k).copied().unwrap_or(0.0)
    }

    /// Zero-pads to diameter `d`; longer vectors are rejected.
    pub fn padded_to(&self, d: usize) -> Result<Self> {
        if self.diameter() > d {
            return Err(Error::InvalidBeta(format!(
                "vector covers {} hops but the graph diameter is {d}",
                self.diameter()
            )));
        }
        let mut beta = self.beta.clone();
        beta.resize(d + 1, 0.0);
        Ok(HopPortationVector { beta })
    }

    /// Per-row normalizer: `beta_0` plus every `beta_k` whose neighborhood
    /// is non-empty from the row's source.
    #[inline]
    pub(crate) fn row_normalizer(&self, summary: &SourceSummary) -> f64 {
        self.beta[0]
            + self.beta[1..]
                .iter()
                .enumerate()
                .filter(|(k, _)| summary.neighborhood_size(k + 1) > 0)
                .map(|(_, b)| b)
                .sum::<f64>()
    }

    /// Row-renormalized HopRank probability of a target at distance `hop`.
    #[inline]
    pub(crate) fn mass(&self, hop: Hop, summary: &SourceSummary, node_count: usize) -> f64 {
        let n = node_count as f64;
        let z = self.row_normalizer(summary);
        if z <= 0.0 {
            return 1.0 / n;
        }
        let spread = match hop {
            0 | UNREACHABLE => 0.0,
            k => {
                let size = summary.neighborhood_size(k as usize);
                if size == 0 {
                    0.0
                } else {
                    self.get(k as usize) / size as f64
                }
            }
        };
        (spread + self.beta[0] / n) / z
    }
}

impl TryFrom<Vec<f64>> for HopPortationVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HopPortationVector> for Vec<f64> {
    fn from(v: HopPortationVector) -> Self {
        v.beta
    }
}

/// Transition counts of the selected type aggregated by hop distance,
/// `counts[k]` for `k = 0..=d'`.
pub fn hop_counts(t: &TransitionSet, sel: NavSelector, hops: &TransitionHops) -> Result<Vec<u64>> {
    hops.check(t)?;
    let mut counts = vec![0u64; hops.diameter() as usize + 1];
    for (idx, e) in t.entries().iter().enumerate() {
        if !sel.matches(e.nav) {
            continue;
        }
        match hops.hop(idx) {
            UNREACHABLE => {
                return Err(Error::Unreachable {
                    source_id: e.source,
                    target_id: e.target,
                })
            }
            k => counts[k as usize] += e.count,
        }
    }
    Ok(counts)
}

/// HopPortation vector from the share of transitions at each hop distance;
/// self-loops make up `beta_0`.
pub fn fit_hopportation(t: &TransitionSet, sel: NavSelector, hops: &TransitionHops) -> Result<HopPortationVector> {
    let counts = hop_counts(t, sel, hops)?;
    let nobs: u64 = counts.iter().sum();
    if nobs == 0 {
        return Err(Error::NoTransitions(sel));
    }
    let n = nobs as f64;
    Ok(HopPortationVector {
        beta: counts.iter().map(|&c| c as f64 / n).collect(),
    })
}

/// `P_HR(i, j)` for the source described by `profile`.
///
/// The raw mass `beta_k / |N_k(i)| + beta_0 / N` is divided by
/// `beta_0 + sum { beta_k : N_k(i) non-empty }` so that every row sums to one
/// even for sources that cannot reach every hop. A row with zero normalizer is
/// uniform.
pub fn hoprank_prob(i: NodeId, j: NodeId, beta: &HopPortationVector, profile: &SourceProfile) -> f64 {
    debug_assert_eq!(i, profile.source());
    beta.mass(profile.hop_to(j), profile.summary(), profile.dist().len())
}
