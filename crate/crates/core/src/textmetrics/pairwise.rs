use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::levenshtein::{normalize, PatternMasks};
use crate::error::{Error, Result};
use crate::stats::{five_number_summary, FiveNumberSummary};

/// Uniform sample without replacement of `min(n, len)` items, returned in
/// their original order. Deterministic for a fixed seed.
pub fn sample_reports<T: Clone>(reports: &[T], n: usize, seed: u64) -> Result<Vec<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sample size must be at least 2, got {n}")));
    }
    if reports.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 reports to form pairs, got {}",
            reports.len()
        )));
    }
    if reports.len() <= n {
        return Ok(reports.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, reports.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| reports[i].clone()).collect())
}

/// Normalized distance between documents `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseSummary {
    pub summary: FiveNumberSummary,
    pub median: f64,
    pub pairs: usize,
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// All `k (k - 1) / 2` normalized distances, ordered by `(i, j)`.
///
/// Documents should already be normalized. The loop runs on the rayon pool
/// (or a dedicated pool of `workers` threads); the output does not depend
/// on the worker count.
pub fn pairwise_distances(docs: &[String], workers: Option<usize>) -> Result<Vec<PairDistance>> {
    if docs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "pairwise distances need at least 2 documents, got {}",
            docs.len()
        )));
    }
    run_in_pool(workers, || {
        let chars: Vec<Vec<char>> = docs.par_iter().map(|d| d.chars().collect()).collect();
        let masks: Vec<PatternMasks> = chars.par_iter().map(|c| PatternMasks::new(c)).collect();
        let k = docs.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .map(|&(i, j)| {
                // the shorter document as pattern keeps the block count low
                let (p, t) = if chars[i].len() <= chars[j].len() { (i, j) } else { (j, i) };
                let d = masks[p].distance(&chars[t]);
                PairDistance {
                    i,
                    j,
                    distance: normalize(d, chars[i].len(), chars[j].len()),
                }
            })
            .collect()
    })
}

/// Five-number summary of all pairwise normalized distances.
pub fn pairwise_distance_summary(docs: &[String]) -> Result<PairwiseSummary> {
    pairwise_distance_summary_with(docs, None)
}

pub fn pairwise_distance_summary_with(docs: &[String], workers: Option<usize>) -> Result<PairwiseSummary> {
    let distances: Vec<f64> = pairwise_distances(docs, workers)?.iter().map(|p| p.distance).collect();
    let summary = five_number_summary(&distances)?;
    Ok(PairwiseSummary {
        summary,
        median: summary.median,
        pairs: distances.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textmetrics::levenshtein_reference;

    fn docs(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_documents() {
        let s = pairwise_distance_summary(&docs(&["abc", "abc", "abc"])).unwrap();
        assert_eq!(s.median, 0.0);
        assert_eq!(s.summary.max, 0.0);
        assert_eq!(s.pairs, 3);
    }

    #[test]
    fn single_substitutions() {
        let s = pairwise_distance_summary(&docs(&["abc", "abd", "abe"])).unwrap();
        assert_eq!(s.median, 1.0 / 3.0);
        assert_eq!(s.summary.min, 1.0 / 3.0);
        assert_eq!(s.summary.max, 1.0 / 3.0);
    }

    #[test]
    fn ten_document_fixture_matches_reference_dp() {
        let set = docs(&[
            "lapplicantepresentapubblicazionicoerenti",
            "lapplicantepresentapubblicazionipococoerenti",
            "ilcandidatohaunaproduzionescientificaeccellente",
            "ilcandidatohaunaproduzionescientificabuona",
            "giudiziocollegialepositivo",
            "giudiziocollegialenegativo",
            "",
            "x",
            "produzionescientificadibuonlivelloecontinua",
            "lapplicantenonraggiungeilivellirichiesti",
        ]);
        let pairs = pairwise_distances(&set, Some(3)).unwrap();
        assert_eq!(pairs.len(), 45);
        let mut oracle = Vec::new();
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let a: Vec<char> = set[i].chars().collect();
                let b: Vec<char> = set[j].chars().collect();
                let d = levenshtein_reference(&a, &b) as f64 / a.len().max(b.len()).max(1) as f64;
                oracle.push(d);
            }
        }
        for (p, o) in pairs.iter().zip(&oracle) {
            assert_eq!(p.distance, *o, "pair ({}, {})", p.i, p.j);
        }
        let s = pairwise_distance_summary(&set).unwrap();
        assert_eq!(s.summary, five_number_summary(&oracle).unwrap());
    }

    #[test]
    fn permutation_and_worker_invariance() {
        let mut set = docs(&["alpha", "alphabet", "beta", "gamma", "gammaray", "delta"]);
        let a = pairwise_distance_summary_with(&set, Some(1)).unwrap();
        set.reverse();
        let b = pairwise_distance_summary_with(&set, Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_contract() {
        let items: Vec<u32> = (0..500).collect();
        let a = sample_reports(&items, 100, 11).unwrap();
        let b = sample_reports(&items, 100, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        let mut dedup = a.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);
        assert_ne!(a, sample_reports(&items, 100, 12).unwrap());
        assert_eq!(sample_reports(&items[..40], 100, 1).unwrap(), items[..40].to_vec());
        assert!(sample_reports(&items[..1], 100, 1).is_err());
        assert!(sample_reports(&items, 1, 1).is_err());
    }
}
