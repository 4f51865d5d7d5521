#ifndef SCAS_H
#define SCAS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SCAS_FORMAT_XML = 0,
  SCAS_FORMAT_ARC_TABLE = 1,
} ScasFormat;

typedef enum {
  SCAS_STATUS_OK = 0,
  SCAS_STATUS_NULL_ARGUMENT = 1,
  SCAS_STATUS_INVALID_UTF8 = 2,
  /**
   * The model text could not be parsed or violates a structural rule.
   */
  SCAS_STATUS_PARSE_ERROR = 3,
  SCAS_STATUS_UNKNOWN_FEATURE = 4,
  SCAS_STATUS_SCOPE_TOO_LARGE = 5,
  /**
   * No valid configuration meets the requirements.
   */
  SCAS_STATUS_INFEASIBLE = 6,
  /**
   * The scope has no valid configuration or the model lacks layer tags.
   */
  SCAS_STATUS_ENGINE_ERROR = 7,
  SCAS_STATUS_INVALID_ARGUMENT = 8,
  SCAS_STATUS_PANIC = 9,
} ScasStatus;

/**
 * Lazy stream of the valid configurations of one scope.
 */
typedef struct ScasEnumerator ScasEnumerator;

/**
 * Parsed feature model.
 */
typedef struct ScasModel ScasModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `text` in the given dialect into a new model handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` valid for writes.
 */
ScasStatus scas_model_parse(const char *text, ScasFormat format, ScasModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`scas_model_parse`] not yet freed.
 */
void scas_model_free(ScasModel *model);

/**
 * Number of features, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t scas_model_feature_count(const ScasModel *model);

/**
 * Number of hyperarcs, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t scas_model_arc_count(const ScasModel *model);

/**
 * Counts the valid configurations of `scope` (NULL for the model root).
 *
 * # Safety
 * `model` must be a live handle, `scope` NULL or a valid string and `out`
 * valid for writes.
 */
ScasStatus scas_count_configurations(const ScasModel *model, const char *scope, uint64_t *out);

/**
 * Writes the JSON metrics report for `scope`, or for every tagged layer
 * when `scope` is NULL.
 *
 * # Safety
 * `model` must be a live handle, `scope` NULL or a valid string and `out`
 * valid for writes.
 */
ScasStatus scas_metrics_json(const ScasModel *model, const char *scope, char **out);

/**
 * Starts a lazy enumeration of `scope` (NULL for the model root). With
 * `streaming` set the scope-size cap is not applied.
 *
 * # Safety
 * `model` must be a live handle, `scope` NULL or a valid string and `out`
 * valid for writes.
 */
ScasStatus scas_enumerator_new(const ScasModel *model,
                               const char *scope,
                               bool streaming,
                               ScasEnumerator **out);

/**
 * Writes the next configuration as a comma-separated token line, or NULL
 * once the enumeration is exhausted.
 *
 * # Safety
 * `enumerator` must be a live handle and `out` valid for writes.
 */
ScasStatus scas_enumerator_next(ScasEnumerator *enumerator, char **out);

/**
 * # Safety
 * `enumerator` must be NULL or a handle not yet freed.
 */
void scas_enumerator_free(ScasEnumerator *enumerator);

/**
 * Finds the cheapest valid configuration of `scope` holding every feature
 * in `require` and none in `exclude` (comma-separated, either may be NULL).
 * `weights` is NULL or `token value` lines. Writes the configuration line.
 *
 * # Safety
 * `model` must be a live handle, the strings NULL or valid, and `out`
 * valid for writes.
 */
ScasStatus scas_select(const ScasModel *model,
                       const char *scope,
                       const char *require,
                       const char *exclude,
                       const char *weights,
                       char **out);

/**
 * Computes the smallest change from `current` (comma-separated) to a valid
 * configuration meeting the requirements and writes the plan as JSON with
 * `target`, `add`, `remove`, `cost` and `delta_size` fields.
 *
 * # Safety
 * `model` must be a live handle, the strings NULL or valid, and `out`
 * valid for writes.
 */
ScasStatus scas_reconfigure_json(const ScasModel *model,
                                 const char *scope,
                                 const char *current,
                                 const char *require,
                                 const char *exclude,
                                 const char *weights,
                                 char **out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *scas_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void scas_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCAS_H */
