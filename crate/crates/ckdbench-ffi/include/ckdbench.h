#ifndef CKDBENCH_H
#define CKDBENCH_H

/* Generated by cbindgen from ckdbench-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Input format of a dataset file.
typedef enum CkdbDataFormat {
  CKDB_DATA_FORMAT_ARFF = 0,
  CKDB_DATA_FORMAT_CSV = 1,
} CkdbDataFormat;

// Result of a fallible call.
typedef enum CkdbStatus {
  CKDB_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CKDB_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  CKDB_STATUS_INVALID_UTF8 = 2,
  // Dataset or configuration rejected (parse error, schema violation,
  // missing file).
  CKDB_STATUS_DATA_ERROR = 3,
  // I/O or internal failure.
  CKDB_STATUS_INTERNAL_ERROR = 4,
} CkdbStatus;

// Rendering format for [`ckdb_report_table`].
typedef enum CkdbTableFormat {
  CKDB_TABLE_FORMAT_TEXT = 0,
  CKDB_TABLE_FORMAT_CSV = 1,
  CKDB_TABLE_FORMAT_JSON = 2,
} CkdbTableFormat;

// Chart selector for [`ckdb_report_chart_svg`].
typedef enum CkdbChart {
  CKDB_CHART_ACCURACY = 0,
  CKDB_CHART_METRICS = 1,
} CkdbChart;

// Opaque parsed, schema-validated dataset.
typedef struct CkdbDataset CkdbDataset;

// Opaque benchmark report.
typedef struct CkdbReport CkdbReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Loads and schema-validates a dataset file. Returns NULL on failure
// (status and the per-thread error message say why). Free the handle
// with [`ckdb_dataset_free`].
//
// # Safety
// `path` must be a NUL-terminated string valid for the duration of the
// call; `status` may be NULL or must point to writable memory.
struct CkdbDataset *ckdb_dataset_load(const char *path,
                                      enum CkdbDataFormat format,
                                      enum CkdbStatus *status);

// Number of data rows, or 0 for a NULL handle.
//
// # Safety
// `dataset` must be NULL or a live handle from [`ckdb_dataset_load`].
uint64_t ckdb_dataset_rows(const struct CkdbDataset *dataset);

// Dataset summary (row/class/missing counts, numeric ranges) as a JSON
// string. Free with [`ckdb_string_free`]. NULL on NULL input.
//
// # Safety
// `dataset` must be NULL or a live handle from [`ckdb_dataset_load`].
char *ckdb_dataset_summary_json(const struct CkdbDataset *dataset);

// Releases a dataset handle. NULL is a no-op.
//
// # Safety
// `dataset` must be NULL or a handle from [`ckdb_dataset_load`] that has
// not been freed yet.
void ckdb_dataset_free(struct CkdbDataset *dataset);

// The embedded canonical 24-attribute schema as JSON. Free with
// [`ckdb_string_free`].
char *ckdb_schema_json(void);

// Parses the configuration file and runs the full benchmark (every
// classifier on one shared fold plan). Returns NULL on failure; a report
// with per-classifier errors still returns a handle (inspect it with
// [`ckdb_report_any_failed`]). Free with [`ckdb_report_free`].
//
// # Safety
// `config_path` must be a NUL-terminated string; `status` may be NULL or
// must point to writable memory.
struct CkdbReport *ckdb_run_benchmark(const char *config_path, enum CkdbStatus *status);

// Full report as deterministic JSON. Free with [`ckdb_string_free`].
//
// # Safety
// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
char *ckdb_report_json(const struct CkdbReport *report);

// Comparison table in the requested format. Free with
// [`ckdb_string_free`].
//
// # Safety
// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
char *ckdb_report_table(const struct CkdbReport *report, enum CkdbTableFormat format);

// One of the two SVG charts. Free with [`ckdb_string_free`].
//
// # Safety
// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
char *ckdb_report_chart_svg(const struct CkdbReport *report, enum CkdbChart chart);

// 1 if any classifier failed inside the run, 0 if all succeeded,
// -1 for a NULL handle.
//
// # Safety
// `report` must be NULL or a live handle from [`ckdb_run_benchmark`].
int32_t ckdb_report_any_failed(const struct CkdbReport *report);

// Releases a report handle. NULL is a no-op.
//
// # Safety
// `report` must be NULL or a handle from [`ckdb_run_benchmark`] that has
// not been freed yet.
void ckdb_report_free(struct CkdbReport *report);

// The most recent error message on this thread, or NULL if none. The
// caller owns the returned string; free it with [`ckdb_string_free`].
char *ckdb_last_error_message(void);

// Releases a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a pointer previously returned by one of the
// string-returning functions of this library, not yet freed.
void ckdb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CKDBENCH_H */
