//! Undirected graphs and tree decompositions.
//!
//! A [`TreeDecomposition`] is an undirected tree of bags. [`make_nice`] turns one
//! into a [`NiceTreeDecomposition`] whose nodes are typed as leaf, introduce,
//! forget or join, with an empty root bag. Dynamic programs walk the nodes of a
//! nice decomposition in index order, which is a post-order.

mod decomposition;
mod error;
mod format;
mod graph;
mod heuristic;
mod nice;

pub use decomposition::{inflate, validate, TreeDecomposition};
pub use error::TdError;
pub use format::{read_td, write_td};
pub use graph::Graph;
pub use heuristic::{decomposition_from_order, heuristic_decomposition, min_fill_order};
pub use nice::{make_nice, NiceNode, NiceTreeDecomposition, NodeKind};
