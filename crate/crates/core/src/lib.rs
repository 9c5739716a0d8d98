//! Navigation models for clickstreams over a network, with HopRank: a walker
//! that jumps to nodes k hops away with probability `beta_k`.
//!
//! ```
//! use hoprank::clickstream::{read_transitions, NavSelector};
//! use hoprank::graph::{load_edge_list, EdgeListFormat};
//! use hoprank::khop::{profile_sources, TransitionHops};
//! use hoprank::models::{ModelContext, ModelId};
//! use hoprank::selection::{evaluate_all, EvaluationSettings};
//!
//! let g = load_edge_list("a b\na c\nb d\nb e\nc f\nc g\n".as_bytes(), EdgeListFormat::default())?;
//! let t = read_transitions("d\tg\tDC\t5\ne\tf\tDC\t4\na\tb\tDC\t1\n".as_bytes(), &g)?;
//! let d = g.exact_diameter()?;
//! let ctx = ModelContext::new(&g, d)?;
//! let hops = TransitionHops::build(&g, &t, &profile_sources(&g, &t.sources(), d)?)?;
//! let report = evaluate_all("toy", &ctx, &t, &[NavSelector::All], &hops, &EvaluationSettings::default())?;
//! let ranking = report.ranking(NavSelector::All).unwrap();
//! assert_eq!(ranking.evaluations.len(), ModelId::ALL.len());
//! println!("winner: {:?}", ranking.winner());
//! # Ok::<(), hoprank::Error>(())
//! ```

pub mod clickstream;
pub mod error;
pub mod graph;
pub mod khop;
pub mod models;
pub mod selection;
pub mod simulator;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
