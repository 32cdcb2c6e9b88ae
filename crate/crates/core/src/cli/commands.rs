use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::{sha256_file, RunConfig};
use super::output::{cell, Header, OutputDir, METADATA_FILE};
use super::synth::{synthesize, SynthParams};
use crate::corpus::{
    dedupe_applicants, discipline, load_corpus_lenient, save_corpus, Corpus, DedupeReport, Format, LoadOptions, Outcome,
    Reject, Role,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, clique_size_histogram, co_qualification_matrix, maximal_cliques, top_hubs, write_graph, GraphFormat,
    NodeUniverse,
};
use crate::indicators::{compute_indicator_set, meets_thresholds, portfolio_scientific_age, ThresholdTable};
use crate::stats::{
    bootstrap_ci, german_tank, probit_fit_with, spearman_rho, ProbitOptions, StatRecord,
};
use crate::tabulate::{
    age_distribution, age_in_years, default_reference_date, main_category_totals, multiplicity_table,
    publication_type_table, titles_table, top_pubtypes_per_discipline, AgeDistribution, AgeGrouping,
};
use crate::textmetrics::{compute_report_metrics, derive_seed, quadrant_classify, QuadrantLabel, ReportMetrics, ReportOptions};

/// A loaded corpus plus everything derived from the inputs that several
/// stages share.
pub struct Context {
    pub config: RunConfig,
    pub corpus: Corpus,
    pub rejects: Vec<Reject>,
    pub records_read: usize,
    pub dedupe: DedupeReport,
    pub thresholds: Option<ThresholdTable>,
    pub digest: String,
    pub input_hashes: BTreeMap<String, String>,
    report_metrics: OnceCell<Vec<ReportMetrics>>,
}

impl Context {
    /// Loads the corpus named by `config`. With `strict`, the first rejected
    /// record is returned as the error.
    pub fn load(config: &RunConfig, strict: bool) -> Result<Context> {
        let path = config.require_corpus()?;
        let opts = LoadOptions {
            observation_year: config.observation_year_explicit.then_some(config.observation_year),
        };
        let report = load_corpus_lenient(path, config.corpus_format()?, &opts)?;
        if strict {
            if let Some(r) = report.rejects.into_iter().next() {
                return Err(r.error);
            }
            return Self::finish(config, report.corpus, Vec::new(), report.records_read);
        }
        Self::finish(config, report.corpus, report.rejects, report.records_read)
    }

    fn finish(config: &RunConfig, corpus: Corpus, rejects: Vec<Reject>, records_read: usize) -> Result<Context> {
        let (corpus, dedupe) = dedupe_applicants(&corpus);
        let mut config = config.clone();
        config.observation_year = corpus.observation_year;
        let mut input_hashes = BTreeMap::new();
        if let Some(p) = &config.corpus_path {
            input_hashes.insert("corpus".to_string(), sha256_file(p)?);
        }
        let thresholds = match &config.thresholds_path {
            Some(p) => {
                input_hashes.insert("thresholds".to_string(), sha256_file(p)?);
                Some(ThresholdTable::load(p)?)
            }
            None => None,
        };
        let pairs: Vec<(&str, &str)> = input_hashes.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let digest = config.digest(&pairs);
        Ok(Context {
            config,
            corpus,
            rejects,
            records_read,
            dedupe,
            thresholds,
            digest,
            input_hashes,
            report_metrics: OnceCell::new(),
        })
    }

    pub fn header(&self) -> Header {
        Header::new(&self.config, self.digest.clone())
    }

    pub fn report_metrics(&self) -> Result<&[ReportMetrics]> {
        if let Some(m) = self.report_metrics.get() {
            return Ok(m);
        }
        let m = compute_report_metrics(
            &self.corpus,
            &ReportOptions {
                sample_size: self.config.sample_size,
                seed: self.config.seed,
                workers: None,
            },
        )?;
        Ok(self.report_metrics.get_or_init(|| m))
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io { .. } => "io",
        Error::Malformed(_) => "malformed",
        Error::UnknownDiscipline { .. } => "unknown_discipline",
        Error::DuplicateSerial { .. } => "duplicate_serial",
        Error::InvalidDisciplineCode(_) => "invalid_discipline_code",
        Error::FutureYear { .. } => "future_year",
        Error::MissingCitations(_) => "missing_citations",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::InsufficientData(_) => "insufficient_data",
        Error::Csv(_) => "csv",
        Error::Json(_) => "json",
        Error::Config(_) => "config",
    }
}

#[derive(Serialize)]
struct DataQuality {
    observation_year: i32,
    records_read: usize,
    applicants: usize,
    applications: usize,
    rejected: usize,
    reject_counts: BTreeMap<&'static str, usize>,
    merged_applicants: usize,
    dropped_applications: Vec<u64>,
    missing: BTreeMap<&'static str, usize>,
}

/// Writes the data-quality summary and the reject list. Returns the number
/// of rejected records.
pub fn stage_ingest(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let c = &ctx.corpus;
    let mut reject_counts = BTreeMap::new();
    for r in &ctx.rejects {
        *reject_counts.entry(error_kind(&r.error)).or_insert(0) += 1;
    }
    let pubs = || c.applicants.values().flat_map(|a| a.publications.iter());
    let missing = BTreeMap::from([
        ("birth_date", c.applicants.values().filter(|a| a.birth_date.is_none()).count()),
        ("report_text", c.applications().filter(|a| a.report_text.trim().is_empty()).count()),
        ("pub_year", pubs().filter(|p| p.pub_year.is_none()).count()),
        ("citations", pubs().filter(|p| p.citations.is_none()).count()),
    ]);
    let dq = DataQuality {
        observation_year: c.observation_year,
        records_read: ctx.records_read,
        applicants: c.applicants.len(),
        applications: c.applications.len(),
        rejected: ctx.rejects.len(),
        reject_counts,
        merged_applicants: ctx.dedupe.merged_applicants,
        dropped_applications: ctx.dedupe.dropped_applications.clone(),
        missing,
    };
    out.write_json("ingest/data_quality.json", &dq)?;
    let rows: Vec<Vec<String>> = ctx
        .rejects
        .iter()
        .map(|r| vec![r.line.to_string(), error_kind(&r.error).to_string(), r.error.to_string()])
        .collect();
    out.write_csv_records("ingest/rejects.csv", &["line", "kind", "message"], &rows)?;
    Ok(ctx.rejects.len())
}

#[derive(Serialize)]
struct IndicatorRow {
    serial_id: u64,
    first_name: String,
    last_name: String,
    discipline: String,
    role: Role,
    outcome: Outcome,
    kind: &'static str,
    scientific_age: Option<u32>,
    sa_defaulted: Option<bool>,
    v1: Option<f64>,
    v2: Option<f64>,
    v3: Option<f64>,
    t1: Option<f64>,
    t2: Option<f64>,
    t3: Option<f64>,
    exceeded: Option<usize>,
    eligible: Option<bool>,
    error: String,
}

/// One row per application. Indicator failures (for instance a portfolio
/// without citation data in a bibliometric discipline) are reported in the
/// `error` column instead of aborting the stage.
pub fn stage_indicators(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let c = &ctx.corpus;
    let mut rows = Vec::with_capacity(c.applications.len());
    let mut failures = 0;
    for app in c.applications() {
        let applicant = c
            .applicant(&app.applicant_ref)
            .ok_or_else(|| Error::InvalidArgument(format!("application {} has no applicant", app.serial_id)))?;
        let d = c
            .disciplines
            .get(&app.discipline)
            .ok_or_else(|| Error::UnknownDiscipline { code: app.discipline.to_string(), line: 0 })?;
        let th = ctx.thresholds.as_ref().and_then(|t| t.get(app.discipline, app.role));
        let mut row = IndicatorRow {
            serial_id: app.serial_id,
            first_name: applicant.first_name.clone(),
            last_name: applicant.last_name.clone(),
            discipline: app.discipline.to_string(),
            role: app.role,
            outcome: app.outcome,
            kind: if d.bibliometric { "bibliometric" } else { "non_bibliometric" },
            scientific_age: None,
            sa_defaulted: None,
            v1: None,
            v2: None,
            v3: None,
            t1: th.map(|t| t.t1),
            t2: th.map(|t| t.t2),
            t3: th.map(|t| t.t3),
            exceeded: None,
            eligible: None,
            error: String::new(),
        };
        let result = portfolio_scientific_age(&applicant.publications, c.observation_year).and_then(|sa| {
            compute_indicator_set(applicant, d, c.observation_year, &c.top_journal_lists).map(|ind| (sa, ind))
        });
        match result {
            Ok(((sa, defaulted), ind)) => {
                row.scientific_age = Some(sa);
                row.sa_defaulted = Some(defaulted);
                row.v1 = Some(ind.v1);
                row.v2 = Some(ind.v2);
                row.v3 = Some(ind.v3);
                if let Some(th) = th {
                    let v = meets_thresholds(&ind, th);
                    row.exceeded = Some(v.exceeded);
                    row.eligible = Some(v.eligible);
                }
            }
            Err(e) => {
                failures += 1;
                row.error = e.to_string();
            }
        }
        rows.push(row);
    }
    out.write_csv("indicators/indicators.csv", &rows)?;
    Ok(failures)
}

#[derive(Serialize)]
struct ReportRow {
    discipline: String,
    area: String,
    role: Role,
    n_reports: usize,
    sample_size: usize,
    sample_seed: u64,
    length_min: f64,
    length_q1: f64,
    length_median: f64,
    length_q3: f64,
    length_max: f64,
    distance_min: String,
    distance_q1: String,
    distance_median: String,
    distance_q3: String,
    distance_max: String,
    rd: String,
    quadrant: String,
    flagged: bool,
}

/// Report metrics, quadrant labels and the short-and-similar groups.
pub fn stage_reports(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let metrics = ctx.report_metrics()?;
    let labels = quadrant_classify(metrics);
    let mut rows = Vec::with_capacity(metrics.len());
    let mut flagged = Vec::new();
    let mut series = String::from("# median_length median_distance discipline role quadrant\n");
    for m in metrics {
        let label = labels.get(&(m.discipline, m.role)).copied();
        let is_flagged = label == Some(QuadrantLabel::ShortSimilar);
        let ds = m.distance_summary;
        let area = discipline::area(m.discipline.area_id()).map(|a| a.code.clone()).unwrap_or_default();
        rows.push(ReportRow {
            discipline: m.discipline.to_string(),
            area: area.clone(),
            role: m.role,
            n_reports: m.n_reports,
            sample_size: m.sample_size,
            sample_seed: m.sample_seed,
            length_min: m.length_summary.min,
            length_q1: m.length_summary.q1,
            length_median: m.length_summary.median,
            length_q3: m.length_summary.q3,
            length_max: m.length_summary.max,
            distance_min: cell(ds.map(|s| s.min)),
            distance_q1: cell(ds.map(|s| s.q1)),
            distance_median: cell(ds.map(|s| s.median)),
            distance_q3: cell(ds.map(|s| s.q3)),
            distance_max: cell(ds.map(|s| s.max)),
            rd: cell(m.rd),
            quadrant: label.map(|l| l.name().to_string()).unwrap_or_default(),
            flagged: is_flagged,
        });
        if let (Some(d), Some(l)) = (m.median_pairwise_distance, label) {
            series.push_str(&format!("{} {} {} {} {}\n", m.length_summary.median, d, m.discipline, m.role, l));
        }
        if is_flagged {
            flagged.push(vec![
                m.discipline.to_string(),
                area,
                m.role.to_string(),
                m.n_reports.to_string(),
                m.length_summary.median.to_string(),
                cell(m.median_pairwise_distance),
            ]);
        }
    }
    out.write_csv("reports/report_metrics.csv", &rows)?;
    out.write_csv_records(
        "reports/flagged.csv",
        &["discipline", "area", "role", "n_reports", "median_length", "median_distance"],
        &flagged,
    )?;
    out.write_text("reports/length_distance.dat", "#", &series)?;
    Ok(flagged.len())
}

/// Co-qualification matrix, graph exports, hubs and maximal cliques.
pub fn stage_graph(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let m = co_qualification_matrix(ctx.corpus.applications(), NodeUniverse::Observed);
    let header_line = out.header().line();

    let codes: Vec<String> = m.disciplines.iter().map(|d| d.to_string()).collect();
    let mut columns = vec!["discipline"];
    columns.extend(codes.iter().map(String::as_str));
    let matrix_rows: Vec<Vec<String>> = (0..codes.len())
        .map(|i| {
            let mut r = vec![codes[i].clone()];
            r.extend((0..codes.len()).map(|j| cell(m.get(i, j))));
            r
        })
        .collect();
    out.write_csv_records("graph/matrix.csv", &columns, &matrix_rows)?;

    let g = build_graph(&m);
    for (format, name) in [
        (GraphFormat::Graphml, "graph/graph.graphml"),
        (GraphFormat::Dot, "graph/graph.dot"),
        (GraphFormat::EdgeCsv, "graph/edges.csv"),
    ] {
        let mut buf = Vec::new();
        write_graph(&g, format, Some(&header_line), &mut buf)?;
        out.write_bytes(name, &buf)?;
    }

    let hubs: Vec<Vec<String>> = top_hubs(&g, g.nodes.len())
        .into_iter()
        .enumerate()
        .map(|(rank, (code, degree))| {
            let area = discipline::area(code.area_id()).map(|a| a.code.clone()).unwrap_or_default();
            vec![(rank + 1).to_string(), code.to_string(), area, degree.to_string()]
        })
        .collect();
    out.write_csv_records("graph/hubs.csv", &["rank", "discipline", "area", "degree"], &hubs)?;

    let cliques = maximal_cliques(&g);
    let clique_rows: Vec<Vec<String>> = cliques
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let members: Vec<String> = c.iter().map(|d| d.to_string()).collect();
            vec![(i + 1).to_string(), c.len().to_string(), members.join(";")]
        })
        .collect();
    out.write_csv_records("graph/cliques.csv", &["clique", "size", "members"], &clique_rows)?;
    let hist: Vec<Vec<String>> = clique_size_histogram(&cliques)
        .into_iter()
        .map(|(size, n)| vec![size.to_string(), n.to_string()])
        .collect();
    out.write_csv_records("graph/clique_histogram.csv", &["size", "count"], &hist)?;
    Ok(g.edges.len())
}

fn record(statistic: &str, group: Option<String>, method: &str, n: usize) -> StatRecord {
    StatRecord {
        statistic: statistic.to_string(),
        group,
        value: None,
        ci_low: None,
        ci_high: None,
        n,
        seed: None,
        method: method.to_string(),
        note: None,
    }
}

fn spearman_records(ctx: &Context) -> Result<Vec<StatRecord>> {
    let metrics = ctx.report_metrics()?;
    let mut counts: BTreeMap<_, usize> = BTreeMap::new();
    for app in ctx.corpus.applications() {
        *counts.entry((app.discipline, app.role)).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    for role in Role::ALL {
        let (x, y): (Vec<f64>, Vec<f64>) = metrics
            .iter()
            .filter(|m| m.role == *role)
            .map(|m| (m.length_summary.median, counts[&(m.discipline, m.role)] as f64))
            .unzip();
        let mut r = record(
            "spearman_length_vs_applications",
            Some(role.name().to_string()),
            "spearman_midrank_percentile_bootstrap",
            x.len(),
        );
        if x.len() < 2 {
            r.note = Some("fewer than two disciplines".into());
            out.push(r);
            continue;
        }
        r.value = spearman_rho(&x, &y)?;
        if r.value.is_none() {
            r.note = Some("undefined: constant input".into());
        } else {
            let seed = derive_seed(ctx.config.seed, &format!("spearman:{role}"));
            r.seed = Some(seed);
            let stat = |a: &[f64], b: &[f64]| spearman_rho(a, b).ok().flatten();
            match bootstrap_ci(&x, &y, stat, ctx.config.ci_level, ctx.config.bootstrap_b, seed) {
                Ok(ci) => {
                    r.ci_low = Some(ci.low);
                    r.ci_high = Some(ci.high);
                    if ci.skipped > 0 {
                        r.note = Some(format!("{} degenerate resamples skipped", ci.skipped));
                    }
                }
                Err(e) => r.note = Some(e.to_string()),
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn probit_records(ctx: &Context) -> Vec<StatRecord> {
    let c = &ctx.corpus;
    let reference = default_reference_date(c.observation_year);
    let mut groups: BTreeMap<(String, Role), (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for app in c.applications() {
        let y = match app.outcome {
            Outcome::Qualified => true,
            Outcome::NotQualified => false,
            Outcome::Unknown => continue,
        };
        let Some(birth) = app.applicant_ref.birth_date else { continue };
        let age = f64::from(age_in_years(birth, reference));
        let area = discipline::area(app.discipline.area_id()).map(|a| a.code.clone()).unwrap_or_default();
        for key in [area, "ALL".to_string()] {
            let g = groups.entry((key, app.role)).or_default();
            g.0.push(age);
            g.1.push(y);
        }
    }
    let opts = ProbitOptions {
        level: ctx.config.ci_level,
        ..ProbitOptions::default()
    };
    groups
        .into_iter()
        .map(|((area, role), (x, y))| {
            let mut r = record("probit_age_slope", Some(format!("{area}/{role}")), "probit_mle_wald", x.len());
            match probit_fit_with(&x, &y, &opts) {
                Ok(fit) => {
                    r.value = Some(fit.beta);
                    r.ci_low = Some(fit.ci_low);
                    r.ci_high = Some(fit.ci_high);
                    let mut notes = Vec::new();
                    if !fit.converged {
                        notes.push("did not converge");
                    }
                    if fit.separation {
                        notes.push("separation");
                    }
                    if !notes.is_empty() {
                        r.note = Some(notes.join("; "));
                    }
                }
                Err(e) => r.note = Some(e.to_string()),
            }
            r
        })
        .collect()
}

fn tank_record(ctx: &Context) -> StatRecord {
    let k = ctx.corpus.applications.len();
    let mut r = record("german_tank_applications", None, "german_tank", k);
    let m = ctx.corpus.applications.keys().next_back().copied();
    match m.map(|m| german_tank(m, k as u64, ctx.config.ci_level)) {
        Some(Ok(t)) => {
            r.value = Some(t.point);
            r.ci_low = Some(t.ci_low);
            r.ci_high = Some(t.ci_high);
            r.note = Some(format!("max serial {}", t.m));
        }
        Some(Err(e)) => r.note = Some(e.to_string()),
        None => r.note = Some("no applications".into()),
    }
    r
}

pub fn stage_stats(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let mut records = spearman_records(ctx)?;
    records.extend(probit_records(ctx));
    records.push(tank_record(ctx));
    out.write_json("stats/stats.json", &records)?;
    Ok(records.len())
}

fn age_rows(d: &AgeDistribution) -> Vec<Vec<String>> {
    d.groups
        .iter()
        .map(|g| {
            let area = g
                .key
                .area
                .and_then(discipline::area)
                .map(|a| a.code.clone())
                .unwrap_or_else(|| "ALL".into());
            let s = g.summary;
            vec![
                area,
                g.key.role.to_string(),
                g.n.to_string(),
                g.missing_birth_date.to_string(),
                cell(s.map(|s| s.min)),
                cell(s.map(|s| s.q1)),
                cell(s.map(|s| s.median)),
                cell(s.map(|s| s.q3)),
                cell(s.map(|s| s.max)),
            ]
        })
        .collect()
}

pub fn stage_tabulate(ctx: &Context, out: &mut OutputDir) -> Result<usize> {
    let c = &ctx.corpus;
    let pubtypes = publication_type_table(c);
    out.write_csv("tabulate/publication_types.csv", &pubtypes.rows)?;
    let mains: Vec<Vec<String>> = main_category_totals(c)
        .into_iter()
        .map(|(m, n, pct)| vec![m.label().to_string(), n.to_string(), pct.to_string()])
        .collect();
    out.write_csv_records("tabulate/main_categories.csv", &["category", "count", "percent"], &mains)?;

    let top = top_pubtypes_per_discipline(c, 4);
    let top_rows: Vec<Vec<String>> = top
        .iter()
        .flat_map(|(code, list)| {
            list.iter().enumerate().map(move |(i, (cat, pct))| {
                vec![code.to_string(), (i + 1).to_string(), cat.key().to_string(), cat.label().to_string(), pct.to_string()]
            })
        })
        .collect();
    out.write_csv_records("tabulate/top_pubtypes.csv", &["discipline", "rank", "key", "label", "percent"], &top_rows)?;

    for role in Role::ALL {
        let t = titles_table(c, *role);
        out.write_csv(&format!("tabulate/titles_{role}.csv"), &t.rows)?;
    }

    let age_cols = ["area", "role", "n", "missing_birth_date", "min", "q1", "median", "q3", "max"];
    for (grouping, name) in [(AgeGrouping::Role, "age_role"), (AgeGrouping::AreaRole, "age_area_role")] {
        let d = age_distribution(c, grouping, None);
        out.write_csv_records(&format!("tabulate/{name}.csv"), &age_cols, &age_rows(&d))?;
    }

    out.write_csv("tabulate/multiplicity.csv", &multiplicity_table(c))?;
    Ok(pubtypes.total as usize)
}

#[derive(Serialize)]
struct FileEntry<'a> {
    path: &'a str,
    sha256: &'a str,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    started_at: String,
    finished_at: String,
    elapsed_ms: u128,
    config_digest: &'a str,
    config: &'a RunConfig,
    inputs: &'a BTreeMap<String, String>,
    files: Vec<FileEntry<'a>>,
}

fn timestamp(t: SystemTime) -> String {
    let d = t.duration_since(UNIX_EPOCH).unwrap_or_default();
    chrono::DateTime::from_timestamp(d.as_secs() as i64, d.subsec_nanos())
        .map(|dt| dt.to_rfc3339())
        .unwrap_or_default()
}

/// The sidecar holding wall-clock data, kept apart from the stamped outputs
/// so those stay byte-identical across runs.
fn write_metadata(
    out: &OutputDir,
    command: &str,
    config: &RunConfig,
    digest: &str,
    inputs: &BTreeMap<String, String>,
    started: (SystemTime, Instant),
) -> Result<()> {
    let mut written: Vec<&(String, String)> = out.written().iter().collect();
    written.sort();
    let meta = RunMetadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        started_at: timestamp(started.0),
        finished_at: timestamp(SystemTime::now()),
        elapsed_ms: started.1.elapsed().as_millis(),
        config_digest: digest,
        config,
        inputs,
        files: written
            .into_iter()
            .map(|(path, sha256)| FileEntry { path, sha256 })
            .collect(),
    };
    let path = out.root().join(METADATA_FILE);
    let mut bytes = serde_json::to_vec_pretty(&meta)?;
    bytes.push(b'\n');
    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Indicators,
    Reports,
    Graph,
    Stats,
    Tabulate,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Indicators,
        Stage::Reports,
        Stage::Graph,
        Stage::Stats,
        Stage::Tabulate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Indicators => "indicators",
            Stage::Reports => "reports",
            Stage::Graph => "graph",
            Stage::Stats => "stats",
            Stage::Tabulate => "tabulate",
        }
    }

    fn run(&self, ctx: &Context, out: &mut OutputDir) -> Result<usize> {
        match self {
            Stage::Ingest => stage_ingest(ctx, out),
            Stage::Indicators => stage_indicators(ctx, out),
            Stage::Reports => stage_reports(ctx, out),
            Stage::Graph => stage_graph(ctx, out),
            Stage::Stats => stage_stats(ctx, out),
            Stage::Tabulate => stage_tabulate(ctx, out),
        }
    }
}

/// What a run produced; `rejected` is non-zero when ingest found invalid
/// records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub rejected: usize,
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(f),
    }
}

/// Runs `stages` over one loaded corpus into `config.output_dir`.
pub fn run_stages(config: &RunConfig, stages: &[Stage], command: &str) -> Result<RunSummary> {
    let started = (SystemTime::now(), Instant::now());
    in_pool(config.workers, || {
        let lenient = stages.contains(&Stage::Ingest);
        let ctx = Context::load(config, !lenient)?;
        let mut out = OutputDir::create(&config.output_dir, ctx.header())?;
        for s in stages {
            s.run(&ctx, &mut out)?;
        }
        write_metadata(&out, command, &ctx.config, &ctx.digest, &ctx.input_hashes, started)?;
        Ok(RunSummary {
            files: out.written().iter().map(|(p, _)| p.clone()).collect(),
            rejected: ctx.rejects.len(),
        })
    })
}

pub fn cmd_ingest(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Ingest], "ingest")
}

pub fn cmd_indicators(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Indicators], "indicators")
}

pub fn cmd_reports(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Reports], "reports")
}

pub fn cmd_graph(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Graph], "graph")
}

pub fn cmd_stats(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Stats], "stats")
}

pub fn cmd_tabulate(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &[Stage::Tabulate], "tabulate")
}

pub fn cmd_all(config: &RunConfig) -> Result<RunSummary> {
    run_stages(config, &Stage::ALL, "all")
}

/// Writes `corpus.<ext>` and `thresholds.csv` into the output directory.
pub fn cmd_synth(config: &RunConfig, params: &SynthParams) -> Result<RunSummary> {
    let started = (SystemTime::now(), Instant::now());
    let (corpus, thresholds) = synthesize(params)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let format = match &config.format {
        Some(f) => f.parse()?,
        None => Format::Jsonl,
    };
    let corpus_name = match format {
        Format::Jsonl => "corpus.jsonl",
        Format::Csv => "corpus.csv",
    };
    save_corpus(&corpus, dir.join(corpus_name), format)?;
    let th_path = dir.join("thresholds.csv");
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&th_path)?;
    w.write_record(["discipline", "role", "t1", "t2", "t3"])?;
    for t in &thresholds {
        w.serialize(t)?;
    }
    w.flush().map_err(|e| Error::io(&th_path, e))?;

    let mut cfg = config.clone();
    cfg.seed = params.seed;
    cfg.observation_year = params.observation_year;
    let digest = cfg.digest(&[]);
    let mut out = OutputDir::create(dir, Header::new(&cfg, digest.clone()))?;
    for name in [corpus_name, "thresholds.csv"] {
        out.record_existing(name)?;
    }
    write_metadata(&out, "synth", &cfg, &digest, &BTreeMap::new(), started)?;
    Ok(RunSummary {
        files: out.written().iter().map(|(p, _)| p.clone()).collect(),
        rejected: 0,
    })
}
