//! Compression of graph learning problems by color refinement.
//!
//! A graph's nodes are grouped by (graded, depth-bounded) refinement
//! classes; each class is replaced by one representative, giving a smaller
//! graph on which every GNN of matching depth and width computes the same
//! outputs. [`problem::compress_problem`] extends this to training sets,
//! turning duplicate targets into integer weights.

pub mod bench;
pub mod bound;
pub mod cli;
pub mod error;
pub mod features;
pub mod fixtures;
pub mod gnn;
pub mod graph;
pub mod io;
pub mod problem;
pub mod reduct;
pub mod refine;

pub use bound::{Depth, Grade};
pub use error::{Error, Result};
pub use features::FeatureMatrix;
pub use gnn::{Activation, Aggregation, Gnn, GnnConfig};
pub use graph::{ColorId, ColoredMultigraph, GraphSize, Multiplicity, Multiset};
pub use problem::{
    compress_problem, CompressedProblem, Hypothesis, LearningProblem, LossKind, Target, WeightedTarget,
};
pub use reduct::{compress_graph, reduce_graph, verify_reduct, Policy, Reduct, ReductReport, Substitution};
pub use refine::{refine, Partition, RefinementResult};
