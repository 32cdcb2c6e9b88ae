//! Descriptive tabulations: publication types, scientific titles, applicant
//! ages and application multiplicity.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;

use crate::corpus::{ApplicantKey, Corpus, DisciplineCode, MainCategory, Outcome, PublicationCategory, Role, TitleCategory};
use crate::stats::{five_number_summary, FiveNumberSummary};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub key: String,
    pub label: String,
    /// Enclosing category, for grouped tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub count: u64,
    pub percent: f64,
    pub rank: usize,
}

/// Rows are in rank order: descending count, ties by key ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
    pub total: u64,
}

impl FrequencyTable {
    /// `denominator` is the percent base; `None` uses the sum of counts.
    fn build(mut rows: Vec<FrequencyRow>, denominator: Option<u64>) -> Self {
        let total: u64 = rows.iter().map(|r| r.count).sum();
        let base = denominator.unwrap_or(total);
        rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
        for (i, r) in rows.iter_mut().enumerate() {
            r.rank = i + 1;
            r.percent = if base == 0 { 0.0 } else { r.count as f64 * 100.0 / base as f64 };
        }
        FrequencyTable { rows, total }
    }

    pub fn row(&self, key: &str) -> Option<&FrequencyRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn subtype_counts<'a>(corpus: &Corpus, apps: impl Iterator<Item = &'a crate::corpus::Application>) -> BTreeMap<PublicationCategory, u64> {
    let mut counts = BTreeMap::new();
    for app in apps {
        if let Some(a) = corpus.applicant(&app.applicant_ref) {
            for p in &a.publications {
                *counts.entry(p.category).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Publication subtypes counted once per listing in each application, so a
/// publication submitted with three applications counts three times.
/// Every subtype appears once the corpus has any publication.
pub fn publication_type_table(corpus: &Corpus) -> FrequencyTable {
    let counts = subtype_counts(corpus, corpus.applications());
    if counts.is_empty() {
        return FrequencyTable { rows: Vec::new(), total: 0 };
    }
    let rows = PublicationCategory::ALL
        .iter()
        .map(|c| FrequencyRow {
            key: c.key().to_string(),
            label: c.label().to_string(),
            group: Some(c.main_category().label().to_string()),
            count: counts.get(c).copied().unwrap_or(0),
            percent: 0.0,
            rank: 0,
        })
        .collect();
    FrequencyTable::build(rows, None)
}

/// Totals of a publication-type table per main category, in the canonical
/// category order.
pub fn main_category_totals(corpus: &Corpus) -> Vec<(MainCategory, u64, f64)> {
    let counts = subtype_counts(corpus, corpus.applications());
    let total: u64 = counts.values().sum();
    MainCategory::ALL
        .iter()
        .map(|m| {
            let c: u64 = counts.iter().filter(|(k, _)| k.main_category() == *m).map(|(_, v)| v).sum();
            let pct = if total == 0 { 0.0 } else { c as f64 * 100.0 / total as f64 };
            (*m, c, pct)
        })
        .collect()
}

/// The `k` most frequent subtypes per discipline with their share of the
/// discipline's publication listings.
pub fn top_pubtypes_per_discipline(corpus: &Corpus, k: usize) -> BTreeMap<DisciplineCode, Vec<(PublicationCategory, f64)>> {
    let mut out = BTreeMap::new();
    for code in corpus.disciplines_in_use() {
        let counts = subtype_counts(corpus, corpus.applications().filter(|a| a.discipline == code));
        let total: u64 = counts.values().sum();
        let mut ranked: Vec<_> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.key().cmp(b.0.key())));
        ranked.truncate(k);
        let list = ranked
            .into_iter()
            .map(|(c, n)| (c, n as f64 * 100.0 / total as f64))
            .collect();
        out.insert(code, list);
    }
    out
}

/// Applications of `role` claiming each title at least once. Percentages
/// are relative to the role's application count and need not sum to 100.
pub fn titles_table(corpus: &Corpus, role: Role) -> FrequencyTable {
    let apps: Vec<_> = corpus.applications().filter(|a| a.role == role).collect();
    let rows = TitleCategory::ALL
        .iter()
        .map(|t| FrequencyRow {
            key: t.key().to_string(),
            label: t.label().to_string(),
            group: None,
            count: apps.iter().filter(|a| a.titles.contains(t)).count() as u64,
            percent: 0.0,
            rank: 0,
        })
        .collect();
    let mut table = FrequencyTable::build(rows, Some(apps.len() as u64));
    table.total = apps.len() as u64;
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeGrouping {
    Role,
    AreaRole,
}

/// `area` is `None` under [`AgeGrouping::Role`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AgeGroupKey {
    pub area: Option<u8>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgeGroup {
    pub key: AgeGroupKey,
    pub n: usize,
    pub summary: Option<FiveNumberSummary>,
    pub missing_birth_date: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgeDistribution {
    pub reference_date: NaiveDate,
    pub groups: Vec<AgeGroup>,
    /// Distinct applicants without a birth date, over all groups.
    pub missing_birth_date: usize,
}

pub fn default_reference_date(observation_year: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(observation_year, 12, 31).expect("valid year")
}

/// Whole years from `birth` to `at`; negative when `at` precedes `birth`.
pub fn age_in_years(birth: NaiveDate, at: NaiveDate) -> i32 {
    match at.years_since(birth) {
        Some(y) => y as i32,
        None => -(birth.years_since(at).unwrap_or(0) as i32),
    }
}

/// Ages at `reference_date` (default: December 31 of the observation year),
/// each applicant counted once per group. Applicants without a birth date
/// are left out of the summaries and counted separately.
pub fn age_distribution(corpus: &Corpus, grouping: AgeGrouping, reference_date: Option<NaiveDate>) -> AgeDistribution {
    let reference_date = reference_date.unwrap_or_else(|| default_reference_date(corpus.observation_year));
    let mut members: BTreeMap<AgeGroupKey, BTreeSet<&ApplicantKey>> = BTreeMap::new();
    for app in corpus.applications() {
        let area = match grouping {
            AgeGrouping::Role => None,
            AgeGrouping::AreaRole => Some(app.discipline.area_id()),
        };
        members
            .entry(AgeGroupKey { area, role: app.role })
            .or_default()
            .insert(&app.applicant_ref);
    }
    let mut missing_all = BTreeSet::new();
    let groups = members
        .into_iter()
        .map(|(key, people)| {
            let mut ages = Vec::new();
            let mut missing = 0;
            for p in people {
                match p.birth_date {
                    Some(b) => ages.push(age_in_years(b, reference_date) as f64),
                    None => {
                        missing += 1;
                        missing_all.insert(p);
                    }
                }
            }
            AgeGroup {
                key,
                n: ages.len(),
                summary: five_number_summary(&ages).ok(),
                missing_birth_date: missing,
            }
        })
        .collect();
    AgeDistribution {
        reference_date,
        groups,
        missing_birth_date: missing_all.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityRow {
    /// `"1"` to `"5"`, or `">5"`.
    pub bucket: String,
    pub applicants: u64,
    pub applicants_percent: f64,
    pub qualified: u64,
    pub qualified_percent: f64,
}

pub const MULTIPLICITY_BUCKETS: usize = 5;

/// Individuals by number of applications submitted, and by number of
/// qualifications obtained. Individuals never qualified are absent from the
/// second column.
pub fn multiplicity_table(corpus: &Corpus) -> Vec<MultiplicityRow> {
    let mut per: BTreeMap<&ApplicantKey, (usize, usize)> = BTreeMap::new();
    for app in corpus.applications() {
        let e = per.entry(&app.applicant_ref).or_default();
        e.0 += 1;
        if app.outcome == Outcome::Qualified {
            e.1 += 1;
        }
    }
    let bucket = |n: usize| n.min(MULTIPLICITY_BUCKETS + 1) - 1;
    let mut apps = [0u64; MULTIPLICITY_BUCKETS + 1];
    let mut quals = [0u64; MULTIPLICITY_BUCKETS + 1];
    for &(n, q) in per.values() {
        apps[bucket(n)] += 1;
        if q > 0 {
            quals[bucket(q)] += 1;
        }
    }
    let total_apps: u64 = apps.iter().sum();
    let total_quals: u64 = quals.iter().sum();
    let pct = |c: u64, t: u64| if t == 0 { 0.0 } else { c as f64 * 100.0 / t as f64 };
    (0..=MULTIPLICITY_BUCKETS)
        .map(|i| MultiplicityRow {
            bucket: if i == MULTIPLICITY_BUCKETS {
                format!(">{MULTIPLICITY_BUCKETS}")
            } else {
                (i + 1).to_string()
            },
            applicants: apps[i],
            applicants_percent: pct(apps[i], total_apps),
            qualified: quals[i],
            qualified_percent: pct(quals[i], total_quals),
        })
        .collect()
}
