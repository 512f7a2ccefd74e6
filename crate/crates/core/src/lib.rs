//! Negative type gaps of finite metric trees.
//!
//! The crate computes the 1-negative type gap of a finite metric tree in
//! closed form together with the weighting that attains it, tests strict
//! p-negative type of arbitrary finite metric spaces, estimates the maximal
//! exponent, and ships brute-force oracles that check the closed forms on
//! small inputs.

pub mod error;
pub mod generic;
pub mod io;
pub mod metric;
pub mod negtype;
pub mod oracle;
pub mod pruning;
pub mod report;
pub mod sample;
pub mod simplex;
pub mod tree;

pub use error::{Error, Result};
pub use generic::{gamma_t, GapReport};
pub use metric::FiniteMetric;
pub use negtype::{MaxPEstimate, NegTypeVerdict, Status};
pub use oracle::MinimizationResult;
pub use simplex::{Host, LoadVector, NormalizedLoadVector, Parity, PartitionSums, Simplex};
pub use tree::{EdgeSides, LevelAssignment, MetricTree, OrientedEdge, VertexId};
