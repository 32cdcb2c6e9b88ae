//! Quantitative indicators with scientific-age normalization and the
//! median-threshold eligibility rule.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Applicant, Discipline, DisciplineCode, Publication, PublicationCategory, Role};
use crate::error::{Error, Result};

/// Scientific age never drops below this many years.
pub const MIN_SCIENTIFIC_AGE: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    Bibliometric,
    NonBibliometric,
}

impl IndicatorKind {
    /// Number of thresholds that must be strictly exceeded.
    pub fn required_exceeded(&self) -> usize {
        match self {
            IndicatorKind::Bibliometric => 2,
            IndicatorKind::NonBibliometric => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IndicatorKind::Bibliometric => "bibliometric",
            IndicatorKind::NonBibliometric => "non_bibliometric",
        }
    }
}

/// The three indicator values of one application.
///
/// Bibliometric: journal papers, citations, contemporary h-index.
/// Non-bibliometric: books, papers plus chapters, top-journal papers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSet {
    pub kind: IndicatorKind,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl IndicatorSet {
    pub fn values(&self) -> [f64; 3] {
        [self.v1, self.v2, self.v3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub discipline: DisciplineCode,
    pub role: Role,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl Thresholds {
    pub fn values(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub exceeded: usize,
    pub eligible: bool,
}

/// `max(10, observation_year - first_pub_year + 1)`.
pub fn scientific_age(first_pub_year: i32, observation_year: i32) -> Result<u32> {
    if first_pub_year > observation_year {
        return Err(Error::FutureYear {
            pub_year: first_pub_year,
            observation_year,
        });
    }
    let span = (observation_year - first_pub_year + 1) as u32;
    Ok(span.max(MIN_SCIENTIFIC_AGE))
}

/// Scientific age of a portfolio from its earliest dated publication.
/// Returns the age and whether it was defaulted because no dated
/// publication exists.
pub fn portfolio_scientific_age(publications: &[Publication], observation_year: i32) -> Result<(u32, bool)> {
    match publications.iter().filter_map(|p| p.pub_year).min() {
        Some(first) => Ok((scientific_age(first, observation_year)?, false)),
        None => Ok((MIN_SCIENTIFIC_AGE, true)),
    }
}

/// `raw * 10 / sa`; used for B.1, N.1, N.2 and N.3.
pub fn normalize_count(raw: u64, sa: u32) -> f64 {
    raw as f64 * f64::from(MIN_SCIENTIFIC_AGE) / f64::from(sa)
}

/// `raw_citations / sa`; used for B.2.
pub fn normalize_citations(raw_citations: u64, sa: u32) -> f64 {
    raw_citations as f64 / f64::from(sa)
}

/// Age-weighted citations: `4 / (observation_year - pub_year + 1) * citations`.
pub fn citation_weight(citations: u64, pub_year: i32, observation_year: i32) -> Result<f64> {
    if pub_year > observation_year {
        return Err(Error::FutureYear {
            pub_year,
            observation_year,
        });
    }
    Ok(4.0 / f64::from(observation_year - pub_year + 1) * citations as f64)
}

/// Largest `h` such that at least `h` papers have citation weight `>= h`.
///
/// Papers without a year carry no weight and are skipped; a paper without
/// a citation count is an error.
pub fn contemporary_h_index(papers: &[Publication], observation_year: i32) -> Result<u32> {
    let mut weights = Vec::with_capacity(papers.len());
    for (i, p) in papers.iter().enumerate() {
        let citations = p
            .citations
            .ok_or_else(|| Error::MissingCitations(format!("publication #{i} has no citation count")))?;
        if let Some(year) = p.pub_year {
            weights.push(citation_weight(citations, year, observation_year)?);
        }
    }
    weights.sort_by(|a, b| b.total_cmp(a));
    // weights[h-1] >= h holds for a prefix of h values
    let h = weights
        .iter()
        .enumerate()
        .take_while(|(i, w)| **w >= (*i + 1) as f64)
        .count();
    Ok(h as u32)
}

fn is_top(p: &Publication, top_list: Option<&BTreeSet<String>>) -> bool {
    p.is_top_journal
        || matches!((top_list, &p.venue), (Some(list), Some(v)) if list.contains(v))
}

/// Computes the indicator triple of `applicant` for `discipline`.
///
/// An empty (or undated) portfolio uses the minimum scientific age.
pub fn compute_indicator_set(
    applicant: &Applicant,
    discipline: &Discipline,
    observation_year: i32,
    top_journal_lists: &BTreeMap<DisciplineCode, BTreeSet<String>>,
) -> Result<IndicatorSet> {
    let pubs = &applicant.publications;
    let (sa, _) = portfolio_scientific_age(pubs, observation_year)?;
    let count = |pred: &dyn Fn(&Publication) -> bool| pubs.iter().filter(|p| pred(p)).count() as u64;
    let journal = |p: &Publication| p.category == PublicationCategory::JournalPaper;

    if discipline.bibliometric {
        let cited: Vec<Publication> = pubs.iter().filter(|p| p.citations.is_some()).cloned().collect();
        if cited.is_empty() && !pubs.is_empty() {
            return Err(Error::MissingCitations(format!(
                "applicant {} has no citation data for bibliometric discipline {}",
                applicant.key(),
                discipline.code
            )));
        }
        let total: u64 = cited.iter().filter_map(|p| p.citations).sum();
        Ok(IndicatorSet {
            kind: IndicatorKind::Bibliometric,
            v1: normalize_count(count(&journal), sa),
            v2: normalize_citations(total, sa),
            v3: f64::from(contemporary_h_index(&cited, observation_year)?),
        })
    } else {
        let top_list = top_journal_lists.get(&discipline.code);
        Ok(IndicatorSet {
            kind: IndicatorKind::NonBibliometric,
            v1: normalize_count(count(&|p| p.category == PublicationCategory::Monograph), sa),
            v2: normalize_count(
                count(&|p| journal(p) || p.category == PublicationCategory::BookChapter),
                sa,
            ),
            v3: normalize_count(count(&|p| journal(p) && is_top(p, top_list)), sa),
        })
    }
}

/// Counts thresholds strictly exceeded and applies the eligibility rule.
pub fn meets_thresholds(ind: &IndicatorSet, th: &Thresholds) -> Verdict {
    verdict(ind.kind, ind.values(), th.values())
}

/// [`meets_thresholds`] on bare value triples.
pub fn verdict(kind: IndicatorKind, values: [f64; 3], thresholds: [f64; 3]) -> Verdict {
    let exceeded = values.iter().zip(thresholds).filter(|(v, t)| **v > *t).count();
    Verdict {
        exceeded,
        eligible: exceeded >= kind.required_exceeded(),
    }
}

/// Thresholds keyed by (discipline, role).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdTable {
    rows: BTreeMap<(DisciplineCode, Role), Thresholds>,
}

impl ThresholdTable {
    /// Reads `discipline,role,t1,t2,t3` CSV with a header row. Lines
    /// starting with `#` are skipped.
    pub fn from_reader(r: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut rows = BTreeMap::new();
        for row in rdr.deserialize::<Thresholds>() {
            let th = row?;
            if th.values().iter().any(|v| v.is_nan() || *v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "negative or NaN threshold for {} ({})",
                    th.discipline, th.role
                )));
            }
            rows.insert((th.discipline, th.role), th);
        }
        Ok(ThresholdTable { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(f)
    }

    pub fn get(&self, discipline: DisciplineCode, role: Role) -> Option<&Thresholds> {
        self.rows.get(&(discipline, role))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
