//! Corpus ingestion and serialization.
//!
//! Two on-disk formats carry the same records:
//!
//! * **JSONL**: one JSON object per line, discriminated by a `record` field
//!   (`meta`, `applicant`, `application`, `top_journals`).
//! * **CSV**: a header row followed by one row per record, using the column
//!   order in [`CSV_COLUMNS`]. Publications are separate `publication` rows
//!   that reference their applicant through the identity triple.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::discipline::{DisciplineCode, DisciplineTable};
use super::model::*;
use crate::error::{Error, RecordError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" | "ndjson" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Overrides the observation year stored in the file.
    pub observation_year: Option<i32>,
}

/// A rejected record and why.
#[derive(Debug)]
pub struct Reject {
    pub line: usize,
    pub error: Error,
}

/// Result of a lenient load: the valid part of the corpus plus rejects.
#[derive(Debug)]
pub struct LoadReport {
    pub corpus: Corpus,
    pub rejects: Vec<Reject>,
    pub records_read: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum JsonRecord {
    Meta {
        observation_year: i32,
    },
    Applicant(Applicant),
    Application(Application),
    TopJournals {
        discipline: DisciplineCode,
        venues: BTreeSet<String>,
    },
}

/// Loads and validates a corpus; fails on the first rejected record.
pub fn load_corpus(path: impl AsRef<Path>, format: Format) -> Result<Corpus> {
    load_corpus_with(path, format, &LoadOptions::default())
}

pub fn load_corpus_with(path: impl AsRef<Path>, format: Format, opts: &LoadOptions) -> Result<Corpus> {
    let report = load_corpus_lenient(path, format, opts)?;
    match report.rejects.into_iter().next() {
        Some(r) => Err(r.error),
        None => Ok(report.corpus),
    }
}

/// Loads a corpus, collecting invalid records instead of failing on them.
/// Only I/O failures abort the load.
pub fn load_corpus_lenient(path: impl AsRef<Path>, format: Format, opts: &LoadOptions) -> Result<LoadReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let (records, parse_rejects) = match format {
        Format::Jsonl => parse_jsonl(reader, path)?,
        Format::Csv => parse_csv(reader)?,
    };
    Ok(assemble(records, parse_rejects, opts))
}

/// Reads a corpus from an in-memory JSONL string.
pub fn corpus_from_jsonl(text: &str, opts: &LoadOptions) -> Result<LoadReport> {
    let (records, rejects) = parse_jsonl(text.as_bytes(), Path::new("<memory>"))?;
    Ok(assemble(records, rejects, opts))
}

/// Records with their 1-based line numbers, plus records that failed to parse.
type Parsed = (Vec<(usize, JsonRecord)>, Vec<Reject>);

fn parse_jsonl(reader: impl BufRead, path: &Path) -> Result<Parsed> {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonRecord>(&line) {
            Ok(rec) => records.push((line_no, rec)),
            Err(e) => rejects.push(Reject {
                line: line_no,
                error: malformed(line_no, &e.to_string()),
            }),
        }
    }
    Ok((records, rejects))
}

fn malformed(line: usize, message: &str) -> Error {
    // serde messages name the offending field between backticks
    let field = message
        .split('`')
        .nth(1)
        .filter(|f| !f.contains(' '))
        .map(str::to_string);
    if let Some(code) = message.strip_prefix("invalid discipline code `") {
        let code = code.split('`').next().unwrap_or_default().to_string();
        return Error::UnknownDiscipline { code, line };
    }
    Error::Malformed(RecordError {
        line,
        field,
        message: message.to_string(),
    })
}

fn assemble(mut records: Vec<(usize, JsonRecord)>, mut rejects: Vec<Reject>, opts: &LoadOptions) -> LoadReport {
    let records_read = records.len() + rejects.len();
    let file_year = records.iter().find_map(|(_, r)| match r {
        JsonRecord::Meta { observation_year } => Some(*observation_year),
        _ => None,
    });
    let observation_year = opts
        .observation_year
        .or(file_year)
        .unwrap_or(DEFAULT_OBSERVATION_YEAR);
    let mut corpus = Corpus::empty(observation_year);
    let table = DisciplineTable::bundled();

    // applicants first so applications may precede their applicant in the file
    records.sort_by_key(|(line, r)| (!matches!(r, JsonRecord::Applicant(_)), *line));
    let mut app_lines: Vec<(usize, Application)> = Vec::new();
    for (line, rec) in records {
        match rec {
            JsonRecord::Meta { .. } => {}
            JsonRecord::TopJournals { discipline, venues } => {
                if table.get(&discipline).is_none() {
                    rejects.push(Reject {
                        line,
                        error: Error::UnknownDiscipline {
                            code: discipline.to_string(),
                            line,
                        },
                    });
                } else {
                    corpus.top_journal_lists.entry(discipline).or_default().extend(venues);
                }
            }
            JsonRecord::Applicant(a) => {
                if let Err(error) = check_applicant(&a, observation_year, line) {
                    rejects.push(Reject { line, error });
                    continue;
                }
                let key = a.key();
                if corpus.applicants.contains_key(&key) {
                    rejects.push(Reject {
                        line,
                        error: Error::Malformed(RecordError {
                            line,
                            field: None,
                            message: format!("duplicate applicant {key}"),
                        }),
                    });
                    continue;
                }
                corpus.applicants.insert(key, a);
            }
            JsonRecord::Application(app) => app_lines.push((line, app)),
        }
    }

    app_lines.sort_by_key(|(line, _)| *line);
    let mut slots = BTreeSet::new();
    for (line, app) in app_lines {
        let reject = |error| Reject { line, error };
        if table.get(&app.discipline).is_none() {
            rejects.push(reject(Error::UnknownDiscipline {
                code: app.discipline.to_string(),
                line,
            }));
        } else if app.serial_id == 0 {
            rejects.push(reject(Error::Malformed(RecordError {
                line,
                field: Some("serial_id".into()),
                message: "serial_id must be positive".into(),
            })));
        } else if corpus.applications.contains_key(&app.serial_id) {
            rejects.push(reject(Error::DuplicateSerial {
                serial_id: app.serial_id,
                line,
            }));
        } else if !corpus.applicants.contains_key(&app.applicant_ref) {
            rejects.push(reject(Error::Malformed(RecordError {
                line,
                field: Some("applicant_ref".into()),
                message: format!("unknown applicant {}", app.applicant_ref),
            })));
        } else if !slots.insert((app.applicant_ref.clone(), app.discipline, app.role)) {
            rejects.push(reject(Error::Malformed(RecordError {
                line,
                field: None,
                message: format!(
                    "second application for {} in {} ({})",
                    app.applicant_ref, app.discipline, app.role
                ),
            })));
        } else {
            corpus.applications.insert(app.serial_id, app);
        }
    }
    rejects.sort_by_key(|r| r.line);
    LoadReport {
        corpus,
        rejects,
        records_read,
    }
}

fn check_applicant(a: &Applicant, observation_year: i32, line: usize) -> Result<()> {
    if a.first_name.trim().is_empty() && a.last_name.trim().is_empty() {
        return Err(Error::Malformed(RecordError {
            line,
            field: Some("last_name".into()),
            message: "applicant has no name".into(),
        }));
    }
    for p in &a.publications {
        if let Some(y) = p.pub_year {
            if y > observation_year {
                return Err(Error::Malformed(RecordError {
                    line,
                    field: Some("pub_year".into()),
                    message: Error::FutureYear {
                        pub_year: y,
                        observation_year,
                    }
                    .to_string(),
                }));
            }
        }
    }
    Ok(())
}

/// Column order of the CSV corpus format.
pub const CSV_COLUMNS: [&str; 17] = [
    "record",
    "serial_id",
    "first_name",
    "last_name",
    "birth_date",
    "discipline",
    "role",
    "outcome",
    "titles",
    "report_text",
    "pub_year",
    "category",
    "is_top_journal",
    "citations",
    "venue",
    "observation_year",
    "venues",
];

#[derive(Debug, Default, Serialize, Deserialize)]
struct CsvRow {
    record: String,
    #[serde(default)]
    serial_id: Option<u64>,
    #[serde(default)]
    first_name: String,
    #[serde(default)]
    last_name: String,
    #[serde(default)]
    birth_date: Option<NaiveDate>,
    #[serde(default)]
    discipline: Option<String>,
    #[serde(default)]
    role: Option<Role>,
    #[serde(default)]
    outcome: Option<Outcome>,
    #[serde(default)]
    titles: String,
    #[serde(default)]
    report_text: String,
    #[serde(default)]
    pub_year: Option<i32>,
    #[serde(default)]
    category: Option<PublicationCategory>,
    #[serde(default)]
    is_top_journal: Option<bool>,
    #[serde(default)]
    citations: Option<u64>,
    #[serde(default)]
    venue: Option<String>,
    #[serde(default)]
    observation_year: Option<i32>,
    #[serde(default)]
    venues: String,
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_csv(reader: impl Read) -> Result<Parsed> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    let mut publications: Vec<(usize, ApplicantKey, Publication)> = Vec::new();
    let headers = rdr.headers().map_err(Error::Csv)?.clone();
    let mut raw = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut raw) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(Error::Csv(e));
                }
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                rejects.push(Reject {
                    line,
                    error: malformed(line, &e.to_string()),
                });
                continue;
            }
        }
        let line = raw.position().map(|p| p.line() as usize).unwrap_or(0);
        let row: CsvRow = match raw.deserialize(Some(&headers)) {
            Ok(r) => r,
            Err(e) => {
                rejects.push(Reject {
                    line,
                    error: malformed(line, &e.to_string()),
                });
                continue;
            }
        };
        match csv_row_to_record(row, line) {
            Ok(CsvParsed::Record(r)) => records.push((line, r)),
            Ok(CsvParsed::Publication(key, p)) => publications.push((line, key, p)),
            Err(error) => rejects.push(Reject { line, error }),
        }
    }
    // attach publication rows to their applicant rows
    let mut index: BTreeMap<ApplicantKey, usize> = BTreeMap::new();
    for (i, (_, r)) in records.iter().enumerate() {
        if let JsonRecord::Applicant(a) = r {
            index.entry(a.key()).or_insert(i);
        }
    }
    for (line, key, p) in publications {
        match index.get(&key) {
            Some(&i) => {
                if let JsonRecord::Applicant(a) = &mut records[i].1 {
                    a.publications.push(p);
                }
            }
            None => rejects.push(Reject {
                line,
                error: Error::Malformed(RecordError {
                    line,
                    field: Some("first_name".into()),
                    message: format!("publication for unknown applicant {key}"),
                }),
            }),
        }
    }
    Ok((records, rejects))
}

enum CsvParsed {
    Record(JsonRecord),
    Publication(ApplicantKey, Publication),
}

fn csv_row_to_record(row: CsvRow, line: usize) -> Result<CsvParsed> {
    let missing = |field: &str| {
        Error::Malformed(RecordError {
            line,
            field: Some(field.to_string()),
            message: "missing value".into(),
        })
    };
    let discipline = |code: Option<String>| -> Result<DisciplineCode> {
        let code = code.ok_or_else(|| missing("discipline"))?;
        code.parse().map_err(|_| Error::UnknownDiscipline { code, line })
    };
    let key = ApplicantKey {
        first_name: row.first_name.clone(),
        last_name: row.last_name.clone(),
        birth_date: row.birth_date,
    };
    let parsed = match row.record.as_str() {
        "meta" => CsvParsed::Record(JsonRecord::Meta {
            observation_year: row.observation_year.ok_or_else(|| missing("observation_year"))?,
        }),
        "applicant" => CsvParsed::Record(JsonRecord::Applicant(Applicant {
            first_name: row.first_name,
            last_name: row.last_name,
            birth_date: row.birth_date,
            publications: Vec::new(),
        })),
        "publication" => CsvParsed::Publication(
            key,
            Publication {
                pub_year: row.pub_year,
                category: row.category.ok_or_else(|| missing("category"))?,
                is_top_journal: row.is_top_journal.unwrap_or(false),
                citations: row.citations,
                venue: row.venue.filter(|v| !v.is_empty()),
            },
        ),
        "application" => {
            let titles = split_list(&row.titles)
                .map(|t| t.parse::<TitleCategory>())
                .collect::<Result<BTreeSet<_>>>()
                .map_err(|e| {
                    Error::Malformed(RecordError {
                        line,
                        field: Some("titles".into()),
                        message: e.to_string(),
                    })
                })?;
            CsvParsed::Record(JsonRecord::Application(Application {
                serial_id: row.serial_id.ok_or_else(|| missing("serial_id"))?,
                applicant_ref: key,
                discipline: discipline(row.discipline)?,
                role: row.role.ok_or_else(|| missing("role"))?,
                outcome: row.outcome.unwrap_or(Outcome::Unknown),
                report_text: row.report_text,
                titles,
            }))
        }
        "top_journals" => CsvParsed::Record(JsonRecord::TopJournals {
            discipline: discipline(row.discipline)?,
            venues: split_list(&row.venues).map(str::to_string).collect(),
        }),
        other => {
            return Err(Error::Malformed(RecordError {
                line,
                field: Some("record".into()),
                message: format!("unknown record type `{other}`"),
            }))
        }
    };
    Ok(parsed)
}

fn records_of(corpus: &Corpus) -> Vec<JsonRecord> {
    let mut out = vec![JsonRecord::Meta {
        observation_year: corpus.observation_year,
    }];
    for (code, venues) in &corpus.top_journal_lists {
        out.push(JsonRecord::TopJournals {
            discipline: *code,
            venues: venues.clone(),
        });
    }
    out.extend(corpus.applicants.values().cloned().map(JsonRecord::Applicant));
    out.extend(corpus.applications.values().cloned().map(JsonRecord::Application));
    out
}

pub fn write_jsonl(corpus: &Corpus, mut w: impl Write) -> Result<()> {
    for rec in records_of(corpus) {
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

pub fn write_csv(corpus: &Corpus, w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(w);
    for rec in records_of(corpus) {
        match rec {
            JsonRecord::Meta { observation_year } => wtr.serialize(CsvRow {
                record: "meta".into(),
                observation_year: Some(observation_year),
                ..Default::default()
            })?,
            JsonRecord::TopJournals { discipline, venues } => wtr.serialize(CsvRow {
                record: "top_journals".into(),
                discipline: Some(discipline.to_string()),
                venues: venues.into_iter().collect::<Vec<_>>().join(";"),
                ..Default::default()
            })?,
            JsonRecord::Applicant(a) => {
                wtr.serialize(CsvRow {
                    record: "applicant".into(),
                    first_name: a.first_name.clone(),
                    last_name: a.last_name.clone(),
                    birth_date: a.birth_date,
                    ..Default::default()
                })?;
                for p in a.publications {
                    wtr.serialize(CsvRow {
                        record: "publication".into(),
                        first_name: a.first_name.clone(),
                        last_name: a.last_name.clone(),
                        birth_date: a.birth_date,
                        pub_year: p.pub_year,
                        category: Some(p.category),
                        is_top_journal: Some(p.is_top_journal),
                        citations: p.citations,
                        venue: p.venue,
                        ..Default::default()
                    })?;
                }
            }
            JsonRecord::Application(app) => wtr.serialize(CsvRow {
                record: "application".into(),
                serial_id: Some(app.serial_id),
                first_name: app.applicant_ref.first_name,
                last_name: app.applicant_ref.last_name,
                birth_date: app.applicant_ref.birth_date,
                discipline: Some(app.discipline.to_string()),
                role: Some(app.role),
                outcome: Some(app.outcome),
                titles: app.titles.iter().map(|t| t.name()).collect::<Vec<_>>().join(";"),
                report_text: app.report_text,
                ..Default::default()
            })?,
        }
    }
    wtr.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

/// Writes a corpus to `path` in the given format.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    match format {
        Format::Jsonl => write_jsonl(corpus, &mut w)?,
        Format::Csv => write_csv(corpus, &mut w)?,
    }
    w.flush().map_err(|e| Error::io(path, e))
}
