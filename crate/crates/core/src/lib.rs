//! Exact algorithms for deleting few vertices (or recursively eliminating
//! vertices to bounded depth) so that every remaining component has a small
//! dominating set, together with brute-force reference solvers.

pub mod baggraph;
pub mod decomposition;
pub mod domination;
pub mod dp;
pub mod etree;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod semiladder;
pub mod skeleton;

pub use graph::{AnnotatedInstance, Annotations, Graph, VertexSet};
