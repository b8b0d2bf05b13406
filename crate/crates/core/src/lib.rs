//! Structural information toolkit: structural entropy of weighted graphs over
//! encoding trees, greedy and exact minimization, and a learning pipeline that
//! builds data spaces, decoders, knowledge trees and trees of abstractions.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

pub mod entropy;
pub mod error;
pub mod format;
pub mod graph;
pub mod learning;
pub mod optimize;
pub mod scalar;
pub mod similarity;
pub mod tree;

pub use entropy::{
    compressing_info, compressing_info_edgewise, compressing_upper_bound, decoding_info,
    distribution_entropy, entropy_lower_bound, info_report, module_entropy, structural_entropy,
    structural_entropy_edgewise, InfoReport, ModuleFunction,
};
pub use error::{Error, ErrorClass, Result};
pub use graph::{shannon_entropy, Distribution, Graph, VertexSet};
pub use optimize::{
    brute_force_2d, brute_force_kd, decoding_info_k, minimize_2d, minimize_kd, Move, MoveKind,
    OptimizeResult,
};
pub use scalar::Scalar;
pub use similarity::{build_topk_graph, SimilarityMatrix};
pub use tree::{star_tree, EncodingTree, Nested, NodeId, NodePath};

pub type Graph64 = Graph<f64>;
pub type Graph32 = Graph<f32>;
pub type EncodingTree64 = EncodingTree<f64>;
pub type EncodingTree32 = EncodingTree<f32>;
pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type SimilarityMatrix64 = SimilarityMatrix<f64>;
pub type SimilarityMatrix32 = SimilarityMatrix<f32>;
pub type OptimizeResult64 = OptimizeResult<f64>;
pub type InfoReport64 = InfoReport<f64>;
pub type DataSpace64 = learning::DataSpace<f64>;
pub type DataSpace32 = learning::DataSpace<f32>;
