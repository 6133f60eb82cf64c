//! Game abstraction from action embeddings.
//!
//! The pipeline: build a benchmark game ([`games`]), solve it ([`solver`]),
//! sample self-play text ([`corpus`]), learn or fetch action embeddings
//! ([`embed`]), cluster chance observations into buckets and solve the
//! smaller game ([`abstraction`]), then lift the abstract equilibrium back and
//! measure its exploitability in the original game ([`experiment`]).

pub mod abstraction;
pub mod analysis;
pub mod corpus;
pub mod efg;
pub mod embed;
mod error;
pub mod experiment;
pub mod games;
pub mod solver;

pub use error::{Error, Result};
