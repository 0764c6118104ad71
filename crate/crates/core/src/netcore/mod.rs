//! Sparse graph storage, row normalisation and subnetwork block extraction.

mod adjacency;
mod edgelist;
mod selection;
mod weights;

pub use adjacency::AdjacencyMatrix;
pub use edgelist::{load_edge_list, load_labels, load_node_list, write_edge_list, write_labels};
pub use selection::{extract_selection, SparseBlock, SubnetSelection};
pub use weights::{row_normalize, WeightMatrix};
