//! Per-discipline report metrics and the length x distance quadrants.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::pairwise::{pairwise_distance_summary_with, sample_reports};
use crate::corpus::{normalize_text, word_count, Corpus, DisciplineCode, Outcome, Role};
use crate::error::Result;
use crate::stats::{five_number_summary, mean, median, FiveNumberSummary};

pub const DEFAULT_SAMPLE_SIZE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantLabel {
    LongDistinct,
    LongSimilar,
    ShortDistinct,
    ShortSimilar,
}

impl QuadrantLabel {
    pub fn name(&self) -> &'static str {
        match self {
            QuadrantLabel::LongDistinct => "long_distinct",
            QuadrantLabel::LongSimilar => "long_similar",
            QuadrantLabel::ShortDistinct => "short_distinct",
            QuadrantLabel::ShortSimilar => "short_similar",
        }
    }
}

impl fmt::Display for QuadrantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Report statistics for one (discipline, role) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetrics {
    pub discipline: DisciplineCode,
    pub role: Role,
    pub n_reports: usize,
    /// Word counts over every report in the group.
    pub length_summary: FiveNumberSummary,
    /// Median pairwise normalized distance of the sample; `None` with fewer
    /// than two reports.
    pub median_pairwise_distance: Option<f64>,
    pub distance_summary: Option<FiveNumberSummary>,
    /// Relative difference of mean lengths, qualified vs not qualified;
    /// `None` when either side has no reports.
    pub rd: Option<f64>,
    pub sample_seed: u64,
    pub sample_size: usize,
}

/// `|mean(Q) - mean(NQ)| / max(mean(Q), mean(NQ))`, or `None` when a side
/// is empty. Two zero means give 0.
pub fn relative_difference(lengths_qualified: &[f64], lengths_not: &[f64]) -> Option<f64> {
    let q = mean(lengths_qualified)?;
    let nq = mean(lengths_not)?;
    let hi = q.max(nq);
    if hi == 0.0 {
        return Some(0.0);
    }
    Some((q - nq).abs() / hi)
}

/// Labels each group against the medians of the group medians. Values equal
/// to a global median count as short / similar. Groups without a distance
/// are left out.
pub fn quadrant_classify(metrics: &[ReportMetrics]) -> BTreeMap<(DisciplineCode, Role), QuadrantLabel> {
    let usable: Vec<(&ReportMetrics, f64)> = metrics
        .iter()
        .filter_map(|m| m.median_pairwise_distance.map(|d| (m, d)))
        .collect();
    if usable.is_empty() {
        return BTreeMap::new();
    }
    let lengths: Vec<f64> = usable.iter().map(|(m, _)| m.length_summary.median).collect();
    let distances: Vec<f64> = usable.iter().map(|(_, d)| *d).collect();
    let global_len = median(&lengths).expect("non-empty");
    let global_dist = median(&distances).expect("non-empty");
    usable
        .into_iter()
        .map(|(m, d)| {
            let long = m.length_summary.median > global_len;
            let distinct = d > global_dist;
            let label = match (long, distinct) {
                (true, true) => QuadrantLabel::LongDistinct,
                (true, false) => QuadrantLabel::LongSimilar,
                (false, true) => QuadrantLabel::ShortDistinct,
                (false, false) => QuadrantLabel::ShortSimilar,
            };
            ((m.discipline, m.role), label)
        })
        .collect()
}

/// Mixes a run seed with a group label (SplitMix64 over FNV-1a) so each
/// group gets an independent, reproducible sample.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub sample_size: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 0,
            workers: None,
        }
    }
}

struct GroupReports<'a> {
    texts: Vec<&'a str>,
    qualified: Vec<f64>,
    not_qualified: Vec<f64>,
}

/// Computes [`ReportMetrics`] for every (discipline, role) group with at
/// least one non-empty report, in (discipline, role) order.
pub fn compute_report_metrics(corpus: &Corpus, opts: &ReportOptions) -> Result<Vec<ReportMetrics>> {
    let mut groups: BTreeMap<(DisciplineCode, Role), GroupReports> = BTreeMap::new();
    for app in corpus.applications() {
        if app.report_text.trim().is_empty() {
            continue;
        }
        let g = groups.entry((app.discipline, app.role)).or_insert_with(|| GroupReports {
            texts: Vec::new(),
            qualified: Vec::new(),
            not_qualified: Vec::new(),
        });
        g.texts.push(&app.report_text);
        let words = word_count(&app.report_text) as f64;
        match app.outcome {
            Outcome::Qualified => g.qualified.push(words),
            Outcome::NotQualified => g.not_qualified.push(words),
            Outcome::Unknown => {}
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for ((discipline, role), g) in groups {
        let lengths: Vec<f64> = g.texts.iter().map(|t| word_count(t) as f64).collect();
        let sample_seed = derive_seed(opts.seed, &format!("{discipline}:{role}"));
        let (distance_summary, sample_size) = if g.texts.len() >= 2 {
            let sample = sample_reports(&g.texts, opts.sample_size, sample_seed)?;
            let normalized: Vec<String> = sample.iter().map(|t| normalize_text(t)).collect();
            let s = pairwise_distance_summary_with(&normalized, opts.workers)?;
            (Some(s.summary), sample.len())
        } else {
            (None, g.texts.len())
        };
        out.push(ReportMetrics {
            discipline,
            role,
            n_reports: g.texts.len(),
            length_summary: five_number_summary(&lengths)?,
            median_pairwise_distance: distance_summary.map(|s| s.median),
            distance_summary,
            rd: relative_difference(&g.qualified, &g.not_qualified),
            sample_seed,
            sample_size,
        });
    }
    Ok(out)
}
