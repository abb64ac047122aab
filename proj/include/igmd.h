/* igmd.h — C interface to the IG-MD flow classifier.
 *
 * The library learns coherent normal/anomalous patterns from labeled flow
 * records discretized at several z-score precisions, classifies new records
 * with three auditable rules, and explains every decision by the exact
 * patterns matched.
 *
 * All handles are opaque; every fallible call returns an igmd_status and
 * leaves a human-readable message in igmd_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with igmd_string_free().
 */

#ifndef IGMD_H
#define IGMD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum igmd_status {
  IGMD_OK = 0,
  IGMD_ERR_USAGE = 1,    /* bad arguments or configuration */
  IGMD_ERR_IO = 2,       /* unreadable or unwritable file */
  IGMD_ERR_PARSE = 3,    /* malformed input data */
  IGMD_ERR_SCHEMA = 4,   /* data incompatible with the model */
  IGMD_ERR_FORMAT = 5,   /* model file version/checksum/syntax */
  IGMD_ERR_INTERNAL = 6,
} igmd_status;

typedef struct igmd_dataset igmd_dataset;
typedef struct igmd_model igmd_model;

const char* igmd_version(void);
const char* igmd_status_name(igmd_status status);

/* Message from the most recent failing call on this thread ("" if none). */
const char* igmd_last_error(void);

void igmd_string_free(char* s);

/* ---- labeled datasets (training / evaluation input) ------------------- */

/* Loads a comma-delimited file and binarizes labels: rows whose label cell
 * equals normal_label (exact, case-sensitive) are Normal, all others
 * Anomalous. label_column is a header name or a 0-based index rendered as
 * digits; NULL selects the last column. normal_label NULL means "Normal".
 * has_header 0 requires an index selector. */
igmd_status igmd_dataset_open_csv(const char* path, const char* label_column,
                                  int has_header, const char* normal_label,
                                  igmd_dataset** out);

size_t igmd_dataset_row_count(const igmd_dataset* ds);
size_t igmd_dataset_attribute_count(const igmd_dataset* ds);
size_t igmd_dataset_normal_count(const igmd_dataset* ds);

/* Newline-separated warnings collected while loading ("" if none). The
 * pointer is owned by the handle. */
const char* igmd_dataset_warnings(const igmd_dataset* ds);

void igmd_dataset_close(igmd_dataset* ds);

/* ---- training --------------------------------------------------------- */

typedef struct igmd_train_options {
  /* Comma list of z-score rounding precisions, e.g. "0,1"; NULL -> "0,1". */
  const char* precisions;
  /* Guard-band width r in mu_N - r*sigma_N; negative -> default 3. */
  double r;
  /* Stratified fraction of the dataset to train on; outside (0,1) -> all. */
  double train_fraction;
  /* Seed for the subset split; ignored unless train_fraction is set. */
  uint64_t seed;
} igmd_train_options;

/* Fills defaults: precisions "0,1", r 3, train on every row. */
void igmd_train_options_init(igmd_train_options* opts);

igmd_status igmd_train(const igmd_dataset* ds, const igmd_train_options* opts,
                       igmd_model** out);

/* ---- models ----------------------------------------------------------- */

igmd_status igmd_model_save(const igmd_model* m, const char* path);
igmd_status igmd_model_open(const char* path, igmd_model** out);
void igmd_model_close(igmd_model* m);

/* CRC-32 of the model's canonical serialization. */
uint32_t igmd_model_checksum(const igmd_model* m);

/* Pattern-pool summary: counts per class and layer, guard band, provenance. */
igmd_status igmd_model_summary(const igmd_model* m, char** out_text);

/* Newline-separated training warnings ("" if none); owned by the handle. */
const char* igmd_model_warnings(const igmd_model* m);

/* ---- inference -------------------------------------------------------- */

/* Classifies every record of a CSV file against the model's schema and
 * renders the verdicts as CSV text (columns id,label,rule,ns,as,
 * ranking_score). The file may carry the label column (ignored) or omit it;
 * attribute names and order must match the model. */
igmd_status igmd_predict_csv(const igmd_model* m, const char* data_path,
                             int has_header, char** out_csv);

/* Plain-text audit report for one record (0-based data-row ordinal): fired
 * rule, NS/AS, guard-band threshold, and every matched pattern. */
igmd_status igmd_explain(const igmd_model* m, const char* data_path,
                         int has_header, uint64_t instance_id, char** out_text);

/* ---- split-grid evaluation -------------------------------------------- */

typedef struct igmd_evaluate_options {
  const char* precisions; /* NULL -> "0,1" */
  double r;               /* negative -> 3 */
  uint64_t seed;          /* base seed; repeat j uses seed + j */
  uint32_t repeats;       /* 0 -> 1 */
} igmd_evaluate_options;

void igmd_evaluate_options_init(igmd_evaluate_options* opts);

/* Runs the full train/score pipeline for each of the nine k:(10-k) splits.
 * out_report_csv receives the fixed-column report, out_table_text a rendered
 * Accuracy/Recall/Precision/AUC table. Either out pointer may be NULL. */
igmd_status igmd_evaluate(const igmd_dataset* ds,
                          const igmd_evaluate_options* opts,
                          char** out_report_csv, char** out_table_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IGMD_H */
