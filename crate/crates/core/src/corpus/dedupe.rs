use std::collections::{BTreeMap, BTreeSet};

use super::model::{Applicant, ApplicantKey, Corpus};

/// What [`dedupe_applicants`] changed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DedupeReport {
    /// Applicant records folded into another record.
    pub merged_applicants: usize,
    /// Applications dropped because the merge produced a second application
    /// for the same (applicant, discipline, role).
    pub dropped_applications: Vec<u64>,
}

/// Identity used for merging: names with surrounding whitespace removed,
/// inner whitespace collapsed and case folded, plus the exact birth date.
fn identity(key: &ApplicantKey) -> (String, String, Option<chrono::NaiveDate>) {
    let canon = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    (canon(&key.first_name), canon(&key.last_name), key.birth_date)
}

/// Merges applicant records that share the identity triple and re-keys
/// their applications to the surviving record. Records whose names match
/// but whose birth dates differ stay distinct.
pub fn dedupe_applicants(corpus: &Corpus) -> (Corpus, DedupeReport) {
    let mut report = DedupeReport::default();
    let mut survivors: BTreeMap<_, ApplicantKey> = BTreeMap::new();
    let mut rekey: BTreeMap<ApplicantKey, ApplicantKey> = BTreeMap::new();
    let mut applicants: BTreeMap<ApplicantKey, Applicant> = BTreeMap::new();

    // BTreeMap order makes the surviving spelling deterministic
    for (key, applicant) in &corpus.applicants {
        match survivors.get(&identity(key)) {
            Some(target) => {
                report.merged_applicants += 1;
                rekey.insert(key.clone(), target.clone());
                let merged = applicants.get_mut(target).expect("survivor present");
                for p in &applicant.publications {
                    if !merged.publications.contains(p) {
                        merged.publications.push(p.clone());
                    }
                }
            }
            None => {
                survivors.insert(identity(key), key.clone());
                applicants.insert(key.clone(), applicant.clone());
            }
        }
    }

    let mut slots = BTreeSet::new();
    let mut applications = BTreeMap::new();
    for (serial, app) in &corpus.applications {
        let mut app = app.clone();
        if let Some(target) = rekey.get(&app.applicant_ref) {
            app.applicant_ref = target.clone();
        }
        if slots.insert((app.applicant_ref.clone(), app.discipline, app.role)) {
            applications.insert(*serial, app);
        } else {
            report.dropped_applications.push(*serial);
        }
    }

    let out = Corpus {
        applicants,
        applications,
        disciplines: corpus.disciplines.clone(),
        observation_year: corpus.observation_year,
        top_journal_lists: corpus.top_journal_lists.clone(),
    };
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::model::*;
    use chrono::NaiveDate;

    fn applicant(first: &str, last: &str, date: Option<NaiveDate>, years: &[i32]) -> Applicant {
        Applicant {
            first_name: first.into(),
            last_name: last.into(),
            birth_date: date,
            publications: years
                .iter()
                .map(|y| Publication::new(Some(*y), PublicationCategory::JournalPaper))
                .collect(),
        }
    }

    fn corpus_with(applicants: Vec<Applicant>, apps: Vec<(u64, usize, &str, Role)>) -> Corpus {
        let mut c = Corpus::default();
        let keys: Vec<_> = applicants.iter().map(Applicant::key).collect();
        for a in applicants {
            c.applicants.insert(a.key(), a);
        }
        for (serial, who, disc, role) in apps {
            c.applications.insert(
                serial,
                Application {
                    serial_id: serial,
                    applicant_ref: keys[who].clone(),
                    discipline: disc.parse().unwrap(),
                    role,
                    outcome: Outcome::Qualified,
                    report_text: String::new(),
                    titles: Default::default(),
                },
            );
        }
        c
    }

    #[test]
    fn merges_formatting_variants_only() {
        let d1 = NaiveDate::from_ymd_opt(1970, 1, 2);
        let d2 = NaiveDate::from_ymd_opt(1971, 1, 2);
        let c = corpus_with(
            vec![
                applicant("Mario", "Rossi", d1, &[2000]),
                applicant("MARIO ", "rossi", d1, &[2000, 2005]),
                applicant("Mario", "Rossi", d2, &[1999]),
            ],
            vec![
                (1, 0, "01/B1", Role::Associate),
                (2, 1, "01/A1", Role::Associate),
                (3, 1, "01/B1", Role::Associate),
                (4, 2, "01/B1", Role::Associate),
            ],
        );
        let (out, report) = dedupe_applicants(&c);
        assert_eq!(out.applicants.len(), 2);
        assert_eq!(report.merged_applicants, 1);
        assert_eq!(report.dropped_applications, vec![3]);
        let survivor = out.applications[&2].applicant_ref.clone();
        assert_eq!(out.applications[&1].applicant_ref, survivor);
        assert_eq!(out.applicants[&survivor].publications.len(), 2);
        out.validate().unwrap();

        let (twice, report2) = dedupe_applicants(&out);
        assert_eq!(twice, out);
        assert_eq!(report2, DedupeReport::default());
    }
}
