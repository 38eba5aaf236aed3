//! Rotations of a strict stable marriage instance.
//!
//! Rotations are found by repeated exposure from the man-optimal matching and
//! numbered in elimination order, so ids ascend along every chain of the
//! precedence order. Precedence arcs come from the two standard labelling
//! rules; the stored digraph is their transitive reduction.

mod poset_instance;
mod structure;

pub use poset_instance::instance_for_dag;
pub use structure::{build_rotation_structure, Rotation, RotationStructure};
