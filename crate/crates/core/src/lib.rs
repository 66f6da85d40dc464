//! 1-Weisfeiler-Leman color refinement and expressiveness audits for
//! graph-classification datasets.
//!
//! The crate reads datasets in the TU flat-file layout ([`tu`], [`fetch`]),
//! refines node colorings with an exact dataset-global interner ([`wl`]),
//! decides exact isomorphism ([`iso`]), and turns per-graph representations
//! into identifiability and majority-vote accuracy bounds ([`audit`],
//! [`motif`]).

pub mod audit;
pub mod edgelist;
pub mod error;
pub mod fetch;
pub mod graph;
pub mod iso;
pub mod motif;
pub mod tu;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{AdjacencyView, Graph, NodeLabel};
pub use tu::Dataset;
