//! Per-source BFS profiles: shortest-path distances, k-hop neighborhood sizes
//! and the gravitational row normalizer, which together describe row `i` of
//! every k-hop matrix and of the squared-distance matrix.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::ops::Range;

use rayon::prelude::*;

use crate::clickstream::TransitionSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphHash, NodeId};

/// Hop count. Distances are stored in 16 bits.
pub type Hop = u16;

/// Distance marker for nodes outside the source's component.
pub const UNREACHABLE: Hop = Hop::MAX;

/// Default memory budget of a [`ProfileCache`].
pub const DEFAULT_CACHE_BUDGET: usize = 1 << 30;

const CACHE_MAGIC: &[u8; 8] = b"HOPPROF\0";
const CACHE_VERSION: u32 = 1;

/// Validates that a diameter fits the 16-bit hop representation.
pub fn check_diameter(diameter: u32) -> Result<Hop> {
    if diameter < UNREACHABLE as u32 {
        Ok(diameter as Hop)
    } else {
        Err(Error::DiameterTooLarge(diameter))
    }
}

/// Squared-distance denominator of the gravitational weight.
#[inline]
pub(crate) fn grav_denominator(hop: Hop, diameter: Hop) -> f64 {
    let s = match hop {
        0 => diameter as f64 + 2.0,
        UNREACHABLE => diameter as f64 + 1.0,
        k => k as f64,
    };
    s * s
}

/// The part of a profile the models need once per-entry hops are known.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSummary {
    /// `histogram[k]` = number of nodes at distance exactly `k`, for `k = 0..=d'`.
    pub histogram: Vec<u32>,
    /// `sum_l deg(l) / S(i, l)`.
    pub grav_normalizer: f64,
}

impl SourceSummary {
    #[inline]
    pub fn neighborhood_size(&self, k: usize) -> u32 {
        self.histogram.get(k).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceProfile {
    source: NodeId,
    dist: Vec<Hop>,
    summary: SourceSummary,
}

impl SourceProfile {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn dist(&self) -> &[Hop] {
        &self.dist
    }

    #[inline]
    pub fn hop_to(&self, j: NodeId) -> Hop {
        self.dist[j as usize]
    }

    pub fn histogram(&self) -> &[u32] {
        &self.summary.histogram
    }

    pub fn grav_normalizer(&self) -> f64 {
        self.summary.grav_normalizer
    }

    pub fn summary(&self) -> &SourceSummary {
        &self.summary
    }

    pub fn diameter(&self) -> Hop {
        (self.summary.histogram.len() - 1) as Hop
    }

    fn heap_bytes(&self) -> usize {
        profile_bytes(self.dist.len(), self.diameter())
    }
}

fn profile_bytes(node_count: usize, diameter: Hop) -> usize {
    std::mem::size_of::<SourceProfile>() + 2 * node_count + 4 * (diameter as usize + 1)
}

/// Exact BFS from `source`. `diameter` bounds the histogram; a node farther
/// away than `diameter` is an error.
pub fn bfs_profile(g: &Graph, source: NodeId, diameter: u32) -> Result<SourceProfile> {
    let d = check_diameter(diameter)?;
    g.check_node(source)?;
    let mut queue = Vec::with_capacity(g.node_count());
    bfs_into(g, source, d, &mut queue)
}

fn bfs_into(g: &Graph, source: NodeId, d: Hop, queue: &mut Vec<NodeId>) -> Result<SourceProfile> {
    let n = g.node_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut histogram = vec![0u32; d as usize + 1];
    queue.clear();
    dist[source as usize] = 0;
    histogram[0] = 1;
    queue.push(source);
    let mut grav = g.degree_of(source) as f64 / grav_denominator(0, d);
    let mut reached_degree = g.degree_of(source);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let next = dist[v as usize] + 1;
        for &w in g.neighbors(v) {
            if dist[w as usize] == UNREACHABLE {
                if next > d {
                    return Err(Error::DiameterMismatch {
                        found: next as u32,
                        diameter: d as u32,
                    });
                }
                dist[w as usize] = next;
                histogram[next as usize] += 1;
                let deg = g.degree_of(w);
                reached_degree += deg;
                grav += deg as f64 / grav_denominator(next, d);
                queue.push(w);
            }
        }
    }
    let unreached_degree = g.total_degree() - reached_degree;
    if unreached_degree > 0 {
        grav += unreached_degree as f64 / grav_denominator(UNREACHABLE, d);
    }
    Ok(SourceProfile {
        source,
        dist,
        summary: SourceSummary {
            histogram,
            grav_normalizer: grav,
        },
    })
}

/// Entry `(i, j)` of the k-hop matrix `M_k`: `1/|N_k(i)|` when `j` is at
/// distance `k` from `i`, else 0.
pub fn mk_row_mass(profile: &SourceProfile, k: usize, j: NodeId) -> Result<f64> {
    let d = profile.diameter();
    if k == 0 || k > d as usize {
        return Err(Error::HopOutOfRange {
            hop: k,
            diameter: d as u32,
        });
    }
    let size = profile.summary.neighborhood_size(k);
    Ok(if size > 0 && profile.dist.get(j as usize).copied() == Some(k as Hop) {
        1.0 / size as f64
    } else {
        0.0
    })
}

/// Profiles of selected sources, held within a memory budget. Sources that do
/// not fit are recomputed on demand by [`ProfileCache::with_profile`].
#[derive(Debug, Clone)]
pub struct ProfileCache {
    diameter: Hop,
    graph_hash: GraphHash,
    node_count: usize,
    profiles: BTreeMap<NodeId, SourceProfile>,
    budget_bytes: usize,
    used_bytes: usize,
}

impl ProfileCache {
    pub fn new(g: &Graph, diameter: u32, budget_bytes: usize) -> Result<Self> {
        Ok(ProfileCache {
            diameter: check_diameter(diameter)?,
            graph_hash: g.hash(),
            node_count: g.node_count(),
            profiles: BTreeMap::new(),
            budget_bytes,
            used_bytes: 0,
        })
    }

    pub fn diameter(&self) -> Hop {
        self.diameter
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn used_bytes(&self) -> usize {
        self.used_bytes
    }

    pub fn get(&self, source: NodeId) -> Option<&SourceProfile> {
        self.profiles.get(&source)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &SourceProfile> {
        self.profiles.values()
    }

    /// Stores a profile if it fits the budget. Returns whether it was stored.
    pub fn insert(&mut self, profile: SourceProfile) -> bool {
        if profile.diameter() != self.diameter || profile.dist.len() != self.node_count {
            return false;
        }
        let bytes = profile.heap_bytes();
        if self.profiles.contains_key(&profile.source) || self.used_bytes + bytes > self.budget_bytes {
            return false;
        }
        self.used_bytes += bytes;
        self.profiles.insert(profile.source, profile);
        true
    }

    /// Runs `f` on the cached profile of `source`, or on a freshly computed
    /// one that is dropped afterwards.
    pub fn with_profile<R>(&self, g: &Graph, source: NodeId, f: impl FnOnce(&SourceProfile) -> R) -> Result<R> {
        self.check_graph(g)?;
        match self.profiles.get(&source) {
            Some(p) => Ok(f(p)),
            None => Ok(f(&bfs_profile(g, source, self.diameter as u32)?)),
        }
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if g.hash() == self.graph_hash {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// Serializes every cached profile: a versioned header followed by
    /// little-endian fixed-width records.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.graph_hash.0)?;
        w.write_all(&(self.node_count as u64).to_le_bytes())?;
        w.write_all(&self.diameter.to_le_bytes())?;
        w.write_all(&(self.profiles.len() as u64).to_le_bytes())?;
        let mut buf = Vec::new();
        for p in self.profiles.values() {
            buf.clear();
            buf.extend_from_slice(&p.source.to_le_bytes());
            buf.extend_from_slice(&p.summary.grav_normalizer.to_le_bytes());
            for h in &p.summary.histogram {
                buf.extend_from_slice(&h.to_le_bytes());
            }
            for d in &p.dist {
                buf.extend_from_slice(&d.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a cache written by [`ProfileCache::write_to`] for graph `g`.
    /// A cache written for another graph yields [`Error::StaleCache`].
    pub fn read_from<R: Read>(mut r: R, g: &Graph, budget_bytes: usize) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let hash = GraphHash(read_array(&mut r)?);
        let node_count = u64::from_le_bytes(read_array(&mut r)?);
        if hash != g.hash() || node_count != g.node_count() as u64 {
            return Err(Error::StaleCache);
        }
        let diameter = u16::from_le_bytes(read_array(&mut r)?);
        let mut cache = ProfileCache::new(g, diameter as u32, budget_bytes)?;
        let count = u64::from_le_bytes(read_array(&mut r)?);
        let n = g.node_count();
        let hist_len = diameter as usize + 1;
        let mut raw_hist = vec![0u8; 4 * hist_len];
        let mut raw_dist = vec![0u8; 2 * n];
        for _ in 0..count {
            let source = u32::from_le_bytes(read_array(&mut r)?);
            if source as usize >= n {
                return Err(Error::CacheFormat(format!("source {source} out of range")));
            }
            let grav = f64::from_le_bytes(read_array(&mut r)?);
            read_exact(&mut r, &mut raw_hist)?;
            read_exact(&mut r, &mut raw_dist)?;
            let histogram: Vec<u32> = raw_hist
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let dist: Vec<Hop> = raw_dist
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let mut check = vec![0u32; hist_len];
            for &h in &dist {
                match h {
                    UNREACHABLE => {}
                    h if h <= diameter => check[h as usize] += 1,
                    h => return Err(Error::CacheFormat(format!("distance {h} exceeds diameter"))),
                }
            }
            if dist[source as usize] != 0 || check != histogram || !grav.is_finite() || grav < 0.0 {
                return Err(Error::CacheFormat(format!("inconsistent record for source {source}")));
            }
            if cache.profiles.contains_key(&source) {
                return Err(Error::CacheFormat(format!("duplicate source {source}")));
            }
            cache.insert(SourceProfile {
                source,
                dist,
                summary: SourceSummary {
                    histogram,
                    grav_normalizer: grav,
                },
            });
        }
        Ok(cache)
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::CacheFormat("truncated".into()),
        _ => Error::Io(e),
    })
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(r, &mut buf)?;
    Ok(buf)
}

/// Profiles every distinct source in `sources` with the default budget.
pub fn profile_sources(g: &Graph, sources: &[NodeId], diameter: u32) -> Result<ProfileCache> {
    profile_sources_within(g, sources, diameter, DEFAULT_CACHE_BUDGET)
}

/// Profiles distinct sources in parallel, in ascending id order, until the
/// budget is exhausted; the rest are left for on-demand computation.
pub fn profile_sources_within(
    g: &Graph,
    sources: &[NodeId],
    diameter: u32,
    budget_bytes: usize,
) -> Result<ProfileCache> {
    let mut cache = ProfileCache::new(g, diameter, budget_bytes)?;
    let mut distinct = sources.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for &s in &distinct {
        g.check_node(s)?;
    }
    let per_profile = profile_bytes(g.node_count(), cache.diameter);
    let fit = budget_bytes.checked_div(per_profile).unwrap_or(0).min(distinct.len());
    let chunk = (rayon::current_num_threads() * 16).max(1);
    for batch in distinct[..fit].chunks(chunk) {
        let profiles = batch
            .par_iter()
            .map_init(Vec::new, |q, &s| bfs_into(g, s, cache.diameter, q))
            .collect::<Result<Vec<_>>>()?;
        for p in profiles {
            cache.insert(p);
        }
    }
    Ok(cache)
}

/// All entries of a transition set that share one source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceGroup {
    pub source: NodeId,
    /// Index range into [`TransitionSet::entries`].
    pub entries: Range<usize>,
    pub summary: SourceSummary,
}

/// The hop distance of every transition entry plus the per-source summaries:
/// everything the models read from BFS, without keeping full distance vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionHops {
    diameter: Hop,
    graph_hash: GraphHash,
    hops: Vec<Hop>,
    groups: Vec<SourceGroup>,
}

impl TransitionHops {
    /// One BFS per distinct source (or a cache hit), in parallel.
    pub fn build(g: &Graph, t: &TransitionSet, cache: &ProfileCache) -> Result<Self> {
        t.check_graph(g)?;
        cache.check_graph(g)?;
        let entries = t.entries();
        let mut ranges = Vec::new();
        let mut start = 0;
        while start < entries.len() {
            let src = entries[start].source;
            let mut end = start;
            while end < entries.len() && entries[end].source == src {
                end += 1;
            }
            ranges.push(start..end);
            start = end;
        }
        let parts = ranges
            .into_par_iter()
            .map(|range| {
                let src = entries[range.start].source;
                cache.with_profile(g, src, |p| {
                    let hops: Vec<Hop> = entries[range.clone()].iter().map(|e| p.hop_to(e.target)).collect();
                    (
                        hops,
                        SourceGroup {
                            source: src,
                            entries: range,
                            summary: p.summary.clone(),
                        },
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut hops = Vec::with_capacity(entries.len());
        let mut groups = Vec::with_capacity(parts.len());
        for (h, grp) in parts {
            hops.extend(h);
            groups.push(grp);
        }
        Ok(TransitionHops {
            diameter: cache.diameter,
            graph_hash: g.hash(),
            hops,
            groups,
        })
    }

    pub fn diameter(&self) -> Hop {
        self.diameter
    }

    /// Hop distance of entry `idx` of the transition set.
    #[inline]
    pub fn hop(&self, idx: usize) -> Hop {
        self.hops[idx]
    }

    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }

    pub fn groups(&self) -> &[SourceGroup] {
        &self.groups
    }

    pub fn check(&self, t: &TransitionSet) -> Result<()> {
        if t.graph_hash() == self.graph_hash && t.entries().len() == self.hops.len() {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }
}
