//! Experiment grids: abstract, solve, lift and measure for every cell.

mod config;
mod runner;

pub use crate::analysis::ExperimentRecord;
pub use config::{EmbeddingSource, ExperimentConfig};
pub use runner::{
    build_maps, cell_seed, evaluate_abstraction, mean_by_cell, resolve_embeddings, results_path, run_experiment,
    Evaluation,
};
