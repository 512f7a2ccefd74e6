use thiserror::Error;

/// Errors raised by tree construction, parsing and the analysis routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("edge set contains a cycle (edge {0} -- {1})")]
    CycleDetected(String, String),
    #[error("edges do not connect all vertices")]
    Disconnected,
    #[error("edge {0} -- {1} has non-positive weight {2}")]
    NonPositiveWeight(String, String, f64),
    #[error("root {0} is not a leaf")]
    RootNotLeaf(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("edge {0} -- {1} is not an edge of the tree")]
    UnknownEdge(String, String),
    #[error("edge {0} -- {1} is not an edge of the simplex's minimal subtree")]
    EdgeNotInMinimalSubtree(String, String),
    #[error("tree has no edges")]
    NoEdges,
    #[error("tree must have at least two vertices")]
    TooFewVertices,

    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("non-positive branch length {0}")]
    NonPositiveBranchLength(f64),
    #[error("empty tree")]
    EmptyTree,
    #[error("parse error on line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("simplex team is empty")]
    EmptyTeam,
    #[error("load vector does not match the simplex (expected {expected} entries, got {got})")]
    LoadLength { expected: usize, got: usize },
    #[error("load entries must be positive")]
    NonPositiveLoad,
    #[error("load vector is not normalized (team sums {0}, {1})")]
    NotNormalized(f64, f64),
    #[error("operation requires a tree host")]
    NotATreeHost,
    #[error("weight vector is zero")]
    ZeroVector,
    #[error("weights do not sum to zero (sum {0})")]
    NonZeroSum(f64),
    #[error("edge {0} -- {1} cannot be pruned")]
    NotPrunable(String, String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("exponent must be non-negative, got {0}")]
    InvalidExponent(f64),
    #[error("metric is a multiple of the discrete metric")]
    DegenerateMetric,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("need at least 2 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("necklace needs at least 2 stars, got {0}")]
    TooSmall(usize),
    #[error("p-negative type still holds at p = {0}; maximal exponent not certified")]
    CapReached(f64),
    #[error("input has {got} vertices, limit is {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
