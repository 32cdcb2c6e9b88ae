use std::collections::BTreeSet;
use std::path::PathBuf;

use chrono::NaiveDate;
use proptest::prelude::*;
use qualmetrics::corpus::io::{corpus_from_jsonl, write_csv, write_jsonl};
use qualmetrics::corpus::*;
use qualmetrics::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const APPLICANT: &str = r#"{"record":"applicant","first_name":"A","last_name":"B","birth_date":"1970-01-01","publications":[{"pub_year":2000,"category":"journal_paper","citations":3}]}"#;

fn application(serial: u64, discipline: &str, role: &str) -> String {
    format!(
        r#"{{"record":"application","serial_id":{serial},"applicant_ref":{{"first_name":"A","last_name":"B","birth_date":"1970-01-01"}},"discipline":"{discipline}","role":"{role}","outcome":"qualified","report_text":"ok"}}"#
    )
}

fn load_str(text: &str) -> LoadReport {
    corpus_from_jsonl(text, &LoadOptions::default()).unwrap()
}

#[test]
fn fixtures_load_cleanly() {
    for (name, apps) in [("corpus_200.jsonl", 200), ("corpus_500.jsonl", 500)] {
        let c = load_corpus(fixture(name), Format::Jsonl).unwrap();
        assert_eq!(c.applications.len(), apps, "{name}");
        c.validate().unwrap();
    }
}

#[test]
fn unknown_discipline_is_rejected_with_line() {
    let text = format!("{APPLICANT}\n{}\n{}\n", application(1, "01/A1", "full"), application(2, "14/Z9", "full"));
    let r = load_str(&text);
    assert_eq!(r.corpus.applications.len(), 1);
    assert_eq!(r.rejects.len(), 1);
    assert_eq!(r.rejects[0].line, 3);
    assert!(matches!(&r.rejects[0].error, Error::UnknownDiscipline { code, .. } if code == "14/Z9"));
}

#[test]
fn malformed_code_and_duplicate_serial() {
    let text = format!(
        "{APPLICANT}\n{}\n{}\n{}\n",
        application(1, "01/A1", "full"),
        application(1, "01/A2", "full"),
        application(2, "1/A1", "full")
    );
    let r = load_str(&text);
    let lines: Vec<usize> = r.rejects.iter().map(|r| r.line).collect();
    assert_eq!(lines, vec![3, 4]);
    assert!(matches!(r.rejects[0].error, Error::DuplicateSerial { serial_id: 1, line: 3 }));
    assert!(r.rejects[1].error.is_validation());
}

#[test]
fn future_publication_year_names_the_field() {
    let text = APPLICANT.replace("2000", "2013");
    let r = load_str(&text);
    assert_eq!(r.rejects.len(), 1);
    match &r.rejects[0].error {
        Error::Malformed(e) => {
            assert_eq!(e.field.as_deref(), Some("pub_year"));
            assert_eq!(e.line, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
    // a later observation year accepts it
    let ok = corpus_from_jsonl(&text, &LoadOptions { observation_year: Some(2013) }).unwrap();
    assert!(ok.rejects.is_empty());
}

#[test]
fn missing_field_and_bad_json() {
    let text = format!("{APPLICANT}\n{{\"record\":\"application\",\"serial_id\":5}}\nnot json\n");
    let r = load_str(&text);
    assert_eq!(r.rejects.len(), 2);
    assert!(r.rejects.iter().all(|r| matches!(r.error, Error::Malformed(_))));
    assert_eq!(r.records_read, 3);
}

#[test]
fn strict_load_fails_on_first_reject() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.jsonl");
    std::fs::write(&p, format!("{APPLICANT}\n{}\n", application(3, "99/A1", "full"))).unwrap();
    assert!(load_corpus(&p, Format::Jsonl).unwrap_err().is_validation());
    assert!(matches!(
        load_corpus(dir.path().join("missing.jsonl"), Format::Jsonl),
        Err(Error::Io { .. })
    ));
}

#[test]
fn observation_year_precedence() {
    let text = format!("{{\"record\":\"meta\",\"observation_year\":2015}}\n{APPLICANT}\n");
    assert_eq!(load_str(&text).corpus.observation_year, 2015);
    let o = corpus_from_jsonl(&text, &LoadOptions { observation_year: Some(2020) }).unwrap();
    assert_eq!(o.corpus.observation_year, 2020);
    assert_eq!(load_str(APPLICANT).corpus.observation_year, DEFAULT_OBSERVATION_YEAR);
}

#[test]
fn edge_fixture_dedupes_formatting_variants() {
    let c = load_corpus(fixture("corpus_edge.jsonl"), Format::Jsonl).unwrap();
    assert_eq!(c.applicants.len(), 4);
    let (d, report) = dedupe_applicants(&c);
    assert_eq!(report.merged_applicants, 1);
    assert!(report.dropped_applications.is_empty());
    assert_eq!(d.applicants.len(), 3);
    assert_eq!(d.applications.len(), c.applications.len());
    d.validate().unwrap();
}

#[test]
fn csv_and_jsonl_agree_on_fixture() {
    let c = load_corpus(fixture("corpus_edge.jsonl"), Format::Jsonl).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    save_corpus(&c, &p, Format::Csv).unwrap();
    assert_eq!(load_corpus(&p, Format::Csv).unwrap(), c);
    assert_eq!(Format::from_path(&p), Format::Csv);
}

fn arb_date() -> impl Strategy<Value = Option<NaiveDate>> {
    prop::option::of((1940i32..1990, 1u32..=12, 1u32..=28).prop_map(|(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap()))
}

fn arb_publication() -> impl Strategy<Value = Publication> {
    (
        prop::option::of(1970i32..=2012),
        prop::sample::select(PublicationCategory::ALL.to_vec()),
        any::<bool>(),
        prop::option::of(0u64..500),
        prop::option::of("[A-Za-z0-9 ,;\"]{1,12}"),
    )
        .prop_map(|(pub_year, category, is_top_journal, citations, venue)| Publication {
            pub_year,
            category,
            is_top_journal,
            citations,
            venue,
        })
}

fn arb_corpus() -> impl Strategy<Value = Corpus> {
    let codes: Vec<DisciplineCode> = DisciplineTable::bundled().iter().map(|d| d.code).collect();
    let applicant = ("[A-Z][a-zà]{0,6}", "[A-Z][a-z]{0,6}( [A-Z][a-z]{1,4})?", arb_date(), prop::collection::vec(arb_publication(), 0..5));
    let app = (
        prop::sample::select(codes),
        prop::sample::select(Role::ALL.to_vec()),
        prop::sample::select(Outcome::ALL.to_vec()),
        "[a-zà ,.\n\"]{0,40}",
        prop::collection::btree_set(prop::sample::select(TitleCategory::ALL.to_vec()), 0..4),
    );
    (
        prop::collection::vec(applicant, 0..6),
        prop::collection::vec((any::<prop::sample::Index>(), app), 0..12),
        2012i32..2016,
    )
        .prop_map(|(people, apps, year)| {
            let mut c = Corpus::empty(year);
            for (first, last, birth_date, publications) in people {
                let a = Applicant {
                    first_name: first,
                    last_name: last,
                    birth_date,
                    publications,
                };
                c.applicants.entry(a.key()).or_insert(a);
            }
            let keys: Vec<ApplicantKey> = c.applicants.keys().cloned().collect();
            let mut slots = BTreeSet::new();
            for (serial, (who, (discipline, role, outcome, report_text, titles))) in apps.into_iter().enumerate() {
                if keys.is_empty() {
                    break;
                }
                let applicant_ref = who.get(&keys).clone();
                if !slots.insert((applicant_ref.clone(), discipline, role)) {
                    continue;
                }
                let serial_id = serial as u64 * 7 + 1;
                c.applications.insert(
                    serial_id,
                    Application {
                        serial_id,
                        applicant_ref,
                        discipline,
                        role,
                        outcome,
                        report_text,
                        titles,
                    },
                );
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_round_trip(c in arb_corpus()) {
        let mut buf = Vec::new();
        write_jsonl(&c, &mut buf).unwrap();
        let r = corpus_from_jsonl(std::str::from_utf8(&buf).unwrap(), &LoadOptions::default()).unwrap();
        prop_assert!(r.rejects.is_empty());
        prop_assert_eq!(r.corpus, c);
    }

    #[test]
    fn csv_round_trip(c in arb_corpus()) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let mut buf = Vec::new();
        write_csv(&c, &mut buf).unwrap();
        std::fs::write(&p, &buf).unwrap();
        let r = load_corpus_lenient(&p, Format::Csv, &LoadOptions::default()).unwrap();
        prop_assert!(r.rejects.is_empty(), "{:?}", r.rejects);
        prop_assert_eq!(r.corpus, c);
    }

    #[test]
    fn dedupe_is_idempotent(c in arb_corpus()) {
        let (once, _) = dedupe_applicants(&c);
        let (twice, report) = dedupe_applicants(&once);
        prop_assert_eq!(report.merged_applicants, 0);
        prop_assert_eq!(twice, once);
    }
}
