//! Two-player zero-sum extensive-form games and their sequence-form view.
//!
//! A [`GameTree`] is an immutable arena of nodes. [`index_sequences`] assigns
//! sequence ids depth-first, [`build_utility_matrix`] aggregates terminal
//! payoffs into the sparse matrix `A` so that player one's expected utility
//! is `xᵀ A y`, and [`size_metrics`] reports the two abstraction-size
//! measures (sequence count and matrix non-zeros).

mod sequence;
mod tree;
mod validate;

pub use sequence::{
    build_utility_matrix, expected_utility, index_sequences, size_metrics, SequenceIndex, SizeMetrics,
    SparseUtilityMatrix,
};
pub use tree::{Actor, Domain, Edge, GameBuilder, GameTree, InfosetKey, Node, NodeId, Observation, Player};
pub use validate::{validate_game, Violation};
