#ifndef QCVINE_H
#define QCVINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcvStatus {
  QCV_STATUS_OK = 0,
  QCV_STATUS_NULL_ARGUMENT = 1,
  QCV_STATUS_INVALID_UTF8 = 2,
  QCV_STATUS_SYNTAX = 3,
  QCV_STATUS_SEMANTIC = 4,
  QCV_STATUS_COMPILE = 5,
  QCV_STATUS_INVALID_JSON = 6,
  QCV_STATUS_NOT_FOUND = 7,
  QCV_STATUS_INVALID_ARGUMENT = 8,
  QCV_STATUS_THEME = 9,
  QCV_STATUS_IO = 10,
  QCV_STATUS_PANIC = 11,
} QcvStatus;

// Opaque compiled circuit.
typedef struct QcvModel QcvModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Compiles a program. `params_json` is an object of integer parameters
// such as `{"n": 3}` and may be null.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum QcvStatus qcv_compile(const char *source, const char *params_json, struct QcvModel **out);

// Loads a model previously produced by `qcv_model_json`.
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum QcvStatus qcv_model_from_json(const char *json, struct QcvModel **out);

// # Safety
// `model` must come from this library and not be used afterwards. Null is ignored.
void qcv_model_free(struct QcvModel *model);

// Number of qubits, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
uint32_t qcv_model_qubits(const struct QcvModel *model);

// Number of gate instances, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
uint64_t qcv_model_gate_count(const struct QcvModel *model);

// Canonical model JSON.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum QcvStatus qcv_model_json(const struct QcvModel *model, char **out);

// Semantic tree JSON.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum QcvStatus qcv_structure_json(const struct QcvModel *model, char **out);

// Renders `view` (component, abstraction, provenance, placement or
// connectivity). `options_json` may be null or an object with `foldDepth`,
// `unfolded`, `qubit`, `node`, `threshold` and `json`. `theme_json` may be
// null for the default theme.
//
// # Safety
// `model` must be a live handle; strings NUL-terminated or null where
// allowed; `out` must be writable.
enum QcvStatus qcv_render(const struct QcvModel *model,
                          const char *view,
                          const char *options_json,
                          const char *theme_json,
                          char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void qcv_string_free(char *s);

// Message for the most recent failure on this thread; empty if none.
// Valid until the next failing call on the same thread.
const char *qcv_last_error(void);

// Library version as a static string.
const char *qcv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCVINE_H */
