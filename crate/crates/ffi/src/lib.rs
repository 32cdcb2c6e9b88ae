//! C ABI over `qualmetrics`.
//!
//! Every function returns a [`QmStatus`]; results go through out-pointers.
//! On failure, [`qm_last_error`] returns a message for the calling thread.
//! Corpora and graphs are opaque handles released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qualmetrics::corpus::{load_corpus, Corpus, Format, Publication, PublicationCategory};
use qualmetrics::graph::{build_graph, co_qualification_matrix, export_graph, CoQualGraph, GraphFormat, NodeUniverse};
use qualmetrics::indicators::{contemporary_h_index, scientific_age, verdict, IndicatorKind};
use qualmetrics::stats::german_tank;
use qualmetrics::textmetrics::{levenshtein, normalized_levenshtein};
use qualmetrics::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Validation = 4,
    Io = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmGraphFormat {
    Graphml = 0,
    Dot = 1,
    EdgeCsv = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmIndicatorKind {
    Bibliometric = 0,
    NonBibliometric = 1,
}

/// Opaque loaded corpus.
pub struct QmCorpus {
    inner: Corpus,
}

/// Opaque co-qualification graph.
pub struct QmGraph {
    inner: CoQualGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> QmStatus {
    if e.is_validation() {
        return QmStatus::Validation;
    }
    match e {
        Error::Io { .. } => QmStatus::Io,
        Error::InvalidArgument(_) | Error::Config(_) => QmStatus::InvalidArgument,
        _ => QmStatus::Internal,
    }
}

struct Fail(QmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(QmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QmStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Edit distance between two UTF-8 strings, in Unicode scalar values.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_levenshtein(a: *const c_char, b: *const c_char, out: *mut usize) -> QmStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        *out_arg(out, "out")? = levenshtein(a, b);
        Ok(())
    })
}

/// Edit distance divided by the longer length; 0 for two empty strings.
///
/// # Safety
/// As [`qm_levenshtein`].
#[no_mangle]
pub unsafe extern "C" fn qm_normalized_levenshtein(a: *const c_char, b: *const c_char, out: *mut f64) -> QmStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        *out_arg(out, "out")? = normalized_levenshtein(a, b);
        Ok(())
    })
}

/// Population estimate and interval from the largest serial `m` among `k`
/// observed ones.
///
/// # Safety
/// The three out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_german_tank(
    m: u64,
    k: u64,
    level: f64,
    point: *mut f64,
    ci_low: *mut f64,
    ci_high: *mut f64,
) -> QmStatus {
    guard(|| {
        let (point, lo, hi) = (out_arg(point, "point")?, out_arg(ci_low, "ci_low")?, out_arg(ci_high, "ci_high")?);
        let t = german_tank(m, k, level)?;
        *point = t.point;
        *lo = t.ci_low;
        *hi = t.ci_high;
        Ok(())
    })
}

/// `max(10, observation_year - first_pub_year + 1)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_scientific_age(first_pub_year: i32, observation_year: i32, out: *mut u32) -> QmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = scientific_age(first_pub_year, observation_year)?;
        Ok(())
    })
}

/// Contemporary h-index of `n` papers given as parallel arrays of
/// publication years and citation counts.
///
/// # Safety
/// `years` and `citations` must point to `n` elements each (or be null
/// when `n` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_contemporary_h_index(
    years: *const i32,
    citations: *const u64,
    n: usize,
    observation_year: i32,
    out: *mut u32,
) -> QmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if n > 0 && (years.is_null() || citations.is_null()) {
            return Err(null("years or citations"));
        }
        let papers: Vec<Publication> = if n == 0 {
            Vec::new()
        } else {
            let ys = std::slice::from_raw_parts(years, n);
            let cs = std::slice::from_raw_parts(citations, n);
            ys.iter()
                .zip(cs)
                .map(|(&y, &c)| Publication::new(Some(y), PublicationCategory::JournalPaper).with_citations(c))
                .collect()
        };
        *out = contemporary_h_index(&papers, observation_year)?;
        Ok(())
    })
}

/// Threshold rule: counts strict exceedances and applies the two-of-three
/// (bibliometric) or one-of-three (non-bibliometric) requirement.
///
/// # Safety
/// `values` and `thresholds` must point to 3 doubles each; out-pointers
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_meets_thresholds(
    kind: QmIndicatorKind,
    values: *const f64,
    thresholds: *const f64,
    exceeded: *mut usize,
    eligible: *mut bool,
) -> QmStatus {
    guard(|| {
        let (exceeded, eligible) = (out_arg(exceeded, "exceeded")?, out_arg(eligible, "eligible")?);
        if values.is_null() || thresholds.is_null() {
            return Err(null("values or thresholds"));
        }
        let read = |p: *const f64| {
            let s = std::slice::from_raw_parts(p, 3);
            [s[0], s[1], s[2]]
        };
        let kind = match kind {
            QmIndicatorKind::Bibliometric => IndicatorKind::Bibliometric,
            QmIndicatorKind::NonBibliometric => IndicatorKind::NonBibliometric,
        };
        let v = verdict(kind, read(values), read(thresholds));
        *exceeded = v.exceeded;
        *eligible = v.eligible;
        Ok(())
    })
}

/// Loads and validates a corpus. `format` is `"jsonl"`, `"csv"` or null to
/// guess from the extension.
///
/// # Safety
/// `path` must be a NUL-terminated string, `format` null or one, and `out`
/// writable. The handle must be released with [`qm_corpus_free`].
#[no_mangle]
pub unsafe extern "C" fn qm_corpus_load(path: *const c_char, format: *const c_char, out: *mut *mut QmCorpus) -> QmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let format = if format.is_null() {
            Format::from_path(Path::new(path))
        } else {
            str_arg(format, "format")?.parse()?
        };
        let corpus = load_corpus(path, format)?;
        *out = Box::into_raw(Box::new(QmCorpus { inner: corpus }));
        Ok(())
    })
}

/// # Safety
/// `corpus` must come from [`qm_corpus_load`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qm_corpus_free(corpus: *mut QmCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// # Safety
/// `corpus` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_corpus_counts(
    corpus: *const QmCorpus,
    applicants: *mut usize,
    applications: *mut usize,
) -> QmStatus {
    guard(|| {
        let c = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        *out_arg(applicants, "applicants")? = c.inner.applicants.len();
        *out_arg(applications, "applications")? = c.inner.applications.len();
        Ok(())
    })
}

/// Builds the co-qualification graph over the disciplines present in the
/// corpus.
///
/// # Safety
/// `corpus` must be a live handle and `out` writable. The graph must be
/// released with [`qm_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn qm_graph_build(corpus: *const QmCorpus, out: *mut *mut QmGraph) -> QmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let c = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        let m = co_qualification_matrix(c.inner.applications(), NodeUniverse::Observed);
        *out = Box::into_raw(Box::new(QmGraph { inner: build_graph(&m) }));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`qm_graph_build`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qm_graph_free(graph: *mut QmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qm_graph_counts(graph: *const QmGraph, nodes: *mut usize, edges: *mut usize) -> QmStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        *out_arg(nodes, "nodes")? = g.inner.nodes.len();
        *out_arg(edges, "edges")? = g.inner.edges.len();
        Ok(())
    })
}

/// Writes the graph to `path`.
///
/// # Safety
/// `graph` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qm_graph_export(graph: *const QmGraph, format: QmGraphFormat, path: *const c_char) -> QmStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let path = str_arg(path, "path")?;
        let format = match format {
            QmGraphFormat::Graphml => GraphFormat::Graphml,
            QmGraphFormat::Dot => GraphFormat::Dot,
            QmGraphFormat::EdgeCsv => GraphFormat::EdgeCsv,
        };
        export_graph(&g.inner, format, path)?;
        Ok(())
    })
}
