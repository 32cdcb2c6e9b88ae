//! Co-qualification matrix and graph over disciplines.

mod cliques;
mod export;
mod matrix;

pub use cliques::{clique_size_histogram, maximal_cliques, maximal_cliques_of, Adjacency};
pub use export::{export_graph, write_graph, GraphFormat};
pub use matrix::{build_graph, co_qualification_matrix, top_hubs, CoQualGraph, CoQualMatrix, Edge, Node, NodeUniverse};
