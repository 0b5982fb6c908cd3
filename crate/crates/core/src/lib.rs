//! Core library: graphs, trees, the two-case embedding engine, an exact
//! containment oracle, instance generators, and the experiment pipeline.

pub mod bits;
pub mod case1;
pub mod case2;
pub mod classify;
pub mod embedding;
pub mod engine;
pub mod enumerate;
pub mod error;
pub mod formats;
pub mod gen;
pub mod graph;
pub mod graph6;
pub mod oracle;
pub mod params;
pub mod pipeline;
pub mod tree;

pub use bits::VertexSet;
pub use embedding::{validate_embedding, PartialEmbedding, ValidationReport};
pub use error::{Error, Result};
pub use graph::Graph;
pub use params::{parse_rat, ParameterSet, Rat};
pub use tree::RootedTree;
