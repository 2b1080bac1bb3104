#ifndef QASSERT_H
#define QASSERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QaFormat {
  QA_FORMAT_TEXT = 0,
  QA_FORMAT_JSON = 1,
} QaFormat;

typedef enum QaKind {
  QA_KIND_CLASSICAL = 0,
  QA_KIND_UNIFORM = 1,
  QA_KIND_PRODUCT = 2,
} QaKind;

typedef enum QaMethod {
  // The checkpoint errored; no test ran.
  QA_METHOD_NONE = 0,
  QA_METHOD_CHI_SQUARE = 1,
  QA_METHOD_FISHER_EXACT = 2,
  QA_METHOD_MONTE_CARLO = 3,
  QA_METHOD_LEGACY_CHI_SQUARE_ADD1 = 4,
} QaMethod;

typedef enum QaStatus {
  QA_STATUS_OK = 0,
  QA_STATUS_NULL_POINTER = 1,
  QA_STATUS_INVALID_UTF8 = 2,
  QA_STATUS_PARSE = 3,
  QA_STATUS_ARGUMENT = 4,
  QA_STATUS_CAPACITY = 5,
  QA_STATUS_QUBIT_INDEX = 6,
  QA_STATUS_CIRCUIT = 7,
  QA_STATUS_NUMERICAL = 8,
  QA_STATUS_INVALID_EXPECTED = 9,
  QA_STATUS_INFEASIBLE_SHOTS = 10,
  QA_STATUS_UNKNOWN_EXAMPLE = 11,
  QA_STATUS_OUT_OF_RANGE = 12,
  QA_STATUS_PANIC = 13,
} QaStatus;

typedef struct QaCircuit QaCircuit;

typedef struct QaReport QaReport;

// Run settings. `shots == 0` keeps each assertion's default shot count.
typedef struct QaConfig {
  uint64_t shots;
  uint64_t seed;
  double alpha;
  uint64_t resamples;
  bool legacy_chisq;
} QaConfig;

// One checkpoint of a report. Tri-state fields use -1 for "not set".
typedef struct QaCheckpoint {
  size_t item_index;
  enum QaKind kind;
  // False when evaluation failed; the fields below are then zero.
  bool evaluated;
  bool passed;
  double p_value;
  double alpha;
  enum QaMethod method;
  uint64_t shots_used;
  // 1 expects pass, 0 expects fail, -1 no expectation.
  int32_t expected_verdict;
  // 1 match, 0 mismatch, -1 no expectation.
  int32_t matches_expected;
} QaCheckpoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null.
//
// The pointer stays valid until the next failing call on the same thread.
const char *qa_last_error_message(void);

struct QaConfig qa_config_default(void);

// Parses circuit-file text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum QaStatus qa_circuit_parse(const char *text, struct QaCircuit **out);

// Builds a built-in example. `params` is null or whitespace-separated
// `KEY=VALUE` pairs; `bug` is null or an injectable bug name.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be valid.
enum QaStatus qa_example_load(const char *name,
                              const char *params,
                              const char *bug,
                              struct QaCircuit **out);

// Number of qubits, or 0 for a null handle.
//
// # Safety
// `circuit` must be null or a live handle.
size_t qa_circuit_n_qubits(const struct QaCircuit *circuit);

// # Safety
// `circuit` must be null or a handle not yet freed.
void qa_circuit_free(struct QaCircuit *circuit);

// Evaluates every checkpoint of `circuit`. A null `config` uses defaults.
//
// # Safety
// `circuit` must be a live handle, `config` null or valid, `out` valid.
enum QaStatus qa_run(const struct QaCircuit *circuit,
                     const struct QaConfig *config,
                     struct QaReport **out);

// Number of checkpoints, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t qa_report_len(const struct QaReport *report);

// Process-style status: 0 when no checkpoint errored or mismatched its
// expected verdict, 1 otherwise, -1 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
int32_t qa_report_exit_code(const struct QaReport *report);

// # Safety
// `report` must be a live handle and `out` valid.
enum QaStatus qa_report_checkpoint(const struct QaReport *report,
                                   size_t index,
                                   struct QaCheckpoint *out);

// Renders the report as text or JSON into a new string owned by the caller.
//
// # Safety
// `report` must be a live handle and `out` valid.
enum QaStatus qa_report_render(const struct QaReport *report, enum QaFormat format, char **out);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void qa_string_free(char *s);

// # Safety
// `report` must be null or a handle not yet freed.
void qa_report_free(struct QaReport *report);

// Two-sided Fisher exact p-value for the table `[[a, b], [c, d]]`.
//
// # Safety
// `out` must be valid.
enum QaStatus qa_fisher_exact_2x2(uint64_t a, uint64_t b, uint64_t c, uint64_t d, double *out);

// Upper regularized incomplete gamma function Q(a, x).
//
// # Safety
// `out` must be valid.
enum QaStatus qa_upper_regularized_gamma(double a, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QASSERT_H */
