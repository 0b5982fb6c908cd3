use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("operation requires two distinct vertices, got {0} twice")]
    IdenticalVertices(usize),

    #[error("average degree {average_degree} does not exceed k-1 = {}", k.saturating_sub(1))]
    HypothesisFailed {
        average_degree: Ratio<u64>,
        k: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("enumeration infeasible: {estimate}")]
    Infeasible { estimate: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
