//! Batch analytics for national research qualification exercises.
//!
//! The crate ingests structured application corpora and computes:
//!
//! * quantitative researcher indicators with scientific-age normalization
//!   and the median-threshold eligibility rule ([`indicators`]);
//! * report-quality metrics based on word length and normalized
//!   Levenshtein distance between panel reports ([`textmetrics`]);
//! * descriptive and inferential statistics ([`stats`], [`tabulate`]);
//! * the co-qualification graph over disciplines with hubs and maximal
//!   cliques ([`graph`]).
//!
//! The [`cli`] module wires everything into the `qualmetrics` binary.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod indicators;
pub mod stats;
pub mod tabulate;
pub mod textmetrics;

pub use error::{Error, Result};
