#ifndef CREDALK_H
#define CREDALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CkBound {
  CK_BOUND_LOWER = 0,
  CK_BOUND_UPPER = 1,
} CkBound;

/**
 * Status codes. The first four match the command-line exit codes.
 */
typedef enum CkStatus {
  CK_STATUS_OK = 0,
  /**
   * A check failed or the joint set is empty; the report is still produced.
   */
  CK_STATUS_FAIL = 1,
  CK_STATUS_INVALID_INPUT = 2,
  CK_STATUS_RESOURCE_CAP = 3,
  CK_STATUS_NULL_POINTER = 4,
  CK_STATUS_PANIC = 5,
} CkStatus;

/**
 * Opaque parsed model.
 */
typedef struct CkModel CkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ck_version(void);

/**
 * Message for the last failing call on this thread, or NULL. Valid until
 * the next call into the library on the same thread.
 */
const char *ck_last_error_message(void);

/**
 * Parses a JSON model. On success `*out` owns a handle to release with
 * [`ck_model_free`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum CkStatus ck_model_from_json(const char *json, struct CkModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`ck_model_from_json`] not yet freed.
 */
void ck_model_free(struct CkModel *model);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void ck_string_free(char *s);

/**
 * Consistency report as JSON. Returns `Fail` when a condition fails.
 *
 * # Safety
 * `model` must be a live handle and `report` a valid pointer.
 */
enum CkStatus ck_validate(const struct CkModel *model, char **report);

/**
 * Joint set document as JSON. Returns `Fail` when the joint set is empty.
 *
 * # Safety
 * `model` must be a live handle and `report` a valid pointer.
 */
enum CkStatus ck_build(const struct CkModel *model, char **report);

/**
 * Full verification report as JSON. Returns `Fail` unless the
 * representation holds for every supplied tuple.
 *
 * # Safety
 * `model` must be a live handle and `report` a valid pointer.
 */
enum CkStatus ck_verify(const struct CkModel *model, char **report);

/**
 * Lower or upper expectation as a rational string.
 *
 * `tuple` is a comma-separated list of index labels; `function` is a JSON
 * array of rationals or whitespace-separated rationals. A nonzero `joint`
 * bounds over the pushforward of the joint set instead of the credal set.
 *
 * # Safety
 * String arguments must be valid NUL-terminated strings, `model` a live
 * handle and `out` a valid pointer.
 */
enum CkStatus ck_expectation(const struct CkModel *model,
                             const char *tuple,
                             const char *function,
                             enum CkBound bound,
                             int32_t joint,
                             char **out);

/**
 * Uniform-split extension of a partition document; `*out` receives a JSON
 * array of rational strings.
 *
 * # Safety
 * `partition` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum CkStatus ck_extend(const char *partition, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CREDALK_H */
