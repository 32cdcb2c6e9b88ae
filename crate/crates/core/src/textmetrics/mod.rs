//! Text distance and report-length metrics.

mod levenshtein;
mod pairwise;
mod reports;

pub use levenshtein::{levenshtein, levenshtein_chars, levenshtein_reference, normalized_levenshtein, PatternMasks};
pub use pairwise::{
    pairwise_distance_summary, pairwise_distance_summary_with, pairwise_distances, sample_reports, PairDistance,
    PairwiseSummary,
};
pub use reports::{
    compute_report_metrics, derive_seed, quadrant_classify, relative_difference, QuadrantLabel, ReportMetrics,
    ReportOptions, DEFAULT_SAMPLE_SIZE,
};
