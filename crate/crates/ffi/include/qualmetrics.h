#ifndef QUALMETRICS_H
#define QUALMETRICS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_UTF8 = 2,
  QM_STATUS_INVALID_ARGUMENT = 3,
  QM_STATUS_VALIDATION = 4,
  QM_STATUS_IO = 5,
  QM_STATUS_INTERNAL = 6,
  QM_STATUS_PANIC = 7,
} QmStatus;

typedef enum {
  QM_INDICATOR_KIND_BIBLIOMETRIC = 0,
  QM_INDICATOR_KIND_NON_BIBLIOMETRIC = 1,
} QmIndicatorKind;

typedef enum {
  QM_GRAPH_FORMAT_GRAPHML = 0,
  QM_GRAPH_FORMAT_DOT = 1,
  QM_GRAPH_FORMAT_EDGE_CSV = 2,
} QmGraphFormat;

// Opaque loaded corpus.
typedef struct QmCorpus QmCorpus;

// Opaque co-qualification graph.
typedef struct QmGraph QmGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call on the same thread.
const char *qm_last_error(void);

// Edit distance between two UTF-8 strings, in Unicode scalar values.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `out` must be writable.
QmStatus qm_levenshtein(const char *a, const char *b, size_t *out);

// Edit distance divided by the longer length; 0 for two empty strings.
//
// # Safety
// As [`qm_levenshtein`].
QmStatus qm_normalized_levenshtein(const char *a, const char *b, double *out);

// Population estimate and interval from the largest serial `m` among `k`
// observed ones.
//
// # Safety
// The three out-pointers must be writable.
QmStatus qm_german_tank(uint64_t m,
                        uint64_t k,
                        double level,
                        double *point,
                        double *ci_low,
                        double *ci_high);

// `max(10, observation_year - first_pub_year + 1)`.
//
// # Safety
// `out` must be writable.
QmStatus qm_scientific_age(int32_t first_pub_year, int32_t observation_year, uint32_t *out);

// Contemporary h-index of `n` papers given as parallel arrays of
// publication years and citation counts.
//
// # Safety
// `years` and `citations` must point to `n` elements each (or be null
// when `n` is 0); `out` must be writable.
QmStatus qm_contemporary_h_index(const int32_t *years,
                                 const uint64_t *citations,
                                 size_t n,
                                 int32_t observation_year,
                                 uint32_t *out);

// Threshold rule: counts strict exceedances and applies the two-of-three
// (bibliometric) or one-of-three (non-bibliometric) requirement.
//
// # Safety
// `values` and `thresholds` must point to 3 doubles each; out-pointers
// must be writable.
QmStatus qm_meets_thresholds(QmIndicatorKind kind,
                             const double *values,
                             const double *thresholds,
                             size_t *exceeded,
                             bool *eligible);

// Loads and validates a corpus. `format` is `"jsonl"`, `"csv"` or null to
// guess from the extension.
//
// # Safety
// `path` must be a NUL-terminated string, `format` null or one, and `out`
// writable. The handle must be released with [`qm_corpus_free`].
QmStatus qm_corpus_load(const char *path, const char *format, QmCorpus **out);

// # Safety
// `corpus` must come from [`qm_corpus_load`] and not be used afterwards.
// Null is ignored.
void qm_corpus_free(QmCorpus *corpus);

// # Safety
// `corpus` must be a live handle; out-pointers must be writable.
QmStatus qm_corpus_counts(const QmCorpus *corpus, size_t *applicants, size_t *applications);

// Builds the co-qualification graph over the disciplines present in the
// corpus.
//
// # Safety
// `corpus` must be a live handle and `out` writable. The graph must be
// released with [`qm_graph_free`].
QmStatus qm_graph_build(const QmCorpus *corpus, QmGraph **out);

// # Safety
// `graph` must come from [`qm_graph_build`] and not be used afterwards.
// Null is ignored.
void qm_graph_free(QmGraph *graph);

// # Safety
// `graph` must be a live handle; out-pointers must be writable.
QmStatus qm_graph_counts(const QmGraph *graph, size_t *nodes, size_t *edges);

// Writes the graph to `path`.
//
// # Safety
// `graph` must be a live handle and `path` a NUL-terminated string.
QmStatus qm_graph_export(const QmGraph *graph, QmGraphFormat format, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUALMETRICS_H */
