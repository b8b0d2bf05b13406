//! The learning pipeline: data spaces built by decoding-information
//! maximization, knowledge trees, trees of abstractions and insertion of new
//! points.

mod catalog;
mod knowledge;
mod space;

pub use catalog::{AbstractionMode, FeatureCatalog, FeatureEntry, TokenSet};
pub use knowledge::{
    classify_by_abstraction, knowledge_tree, AbstractionNode, AbstractionTree, Choice, KnowledgeTree,
};
pub use space::{
    abstraction_tree_for, build_data_space, Construction, DataSpace, Insertion, PointRequest, SweepRow,
};
