//! Neighbour queries and projections over embedding tables, and the results
//! tables experiments write.

mod neighbors;
mod pca;
mod results;

pub use neighbors::{knn, Metric, NeighborList};
pub use pca::{pca2, Projection2D};
pub use results::{emit_results, read_results, summarize, summary_path, write_records, ExperimentRecord, SummaryRow};
