use std::io;

use crate::clickstream::NavSelector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no records")]
    EmptyInput,

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph is not connected ({components} components); pass the largest connected component")]
    Disconnected { components: usize },

    #[error("node id {id} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { id: u32, node_count: usize },

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("hop {hop} outside 1..={diameter}")]
    HopOutOfRange { hop: usize, diameter: u32 },

    #[error("diameter {0} does not fit 16-bit hop counts")]
    DiameterTooLarge(u32),

    #[error("node at distance {found} exceeds the stated diameter {diameter}")]
    DiameterMismatch { found: u32, diameter: u32 },

    #[error("transition {source_id} -> {target_id} joins disconnected nodes")]
    Unreachable { source_id: u32, target_id: u32 },

    #[error("missing required column {0:?}")]
    MissingColumn(String),

    #[error("no transitions for type {0}")]
    NoTransitions(NavSelector),

    #[error("number of observations must be at least 1")]
    NoObservations,

    #[error("invalid HopPortation vector: {0}")]
    InvalidBeta(String),

    #[error("invalid damping factor {0}")]
    InvalidAlpha(f64),

    #[error("transition set was built for a different graph")]
    GraphMismatch,

    #[error("profile cache: {0}")]
    CacheFormat(String),

    #[error("profile cache was written for a different graph")]
    StaleCache,

    #[error("unsatisfiable synthetic spec: {0}")]
    UnsatisfiableSpec(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Io(#[from] io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
