//! Dynamic graph sketches.
//!
//! A static graph with `k` designated terminals is compressed once; the
//! resulting sketch then answers a fixed question about the graph after any
//! set of terminal-terminal edges is inserted. Supported questions: maximum
//! matching size, terminal minimum cuts, s-t edge connectivity, minimum
//! spanning forest weight and s-t shortest-path distance.
//!
//! The matching-based sketches are randomized (Tutte matrix rank over a
//! random evaluation in `Z_p`); the MST and path sketches are exact.

pub mod container;
pub mod cut;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod matching;
pub mod mst;
pub mod oracle;
pub mod path;
pub mod random;
pub mod stconn;
pub mod verify;
pub mod zp;
pub use container::{Problem, Sketch};
pub use cut::CutSketch;
pub use error::{Error, Result};
pub use graph::{apply_query, Edge, Graph, Query, QueryEdge, TerminalCut};
pub use matching::MatchingSketch;
pub use mst::MstSketch;
pub use path::PathSketch;
pub use stconn::StconnSketch;
pub use zp::{FieldSpec, Zp, ZpMatrix};
