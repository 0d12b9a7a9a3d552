#ifndef VVLAB_H
#define VVLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for every fallible entry point.
typedef enum {
  // Success.
  VVLAB_OK = 0,
  // A required pointer argument was null.
  VVLAB_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  VVLAB_INVALID_UTF8 = 2,
  // The configuration failed validation; see the error message.
  VVLAB_INVALID_CONFIG = 3,
  // The experiment ran but could not complete.
  VVLAB_RUN_FAILED = 4,
  // A numeric argument was out of range.
  VVLAB_OUT_OF_RANGE = 5,
} VvlabStatus;

// Three-way classification values returned by
// [`vvlab_instance_classify`].
typedef enum {
  VVLAB_NO = 0,
  VVLAB_YES = 1,
  VVLAB_PROMISE_VIOLATED = 2,
} VvlabClassification;

// Unique-promise classification values returned by
// [`vvlab_instance_classify_unique`].
typedef enum {
  VVLAB_UNIQUE_NO = 0,
  VVLAB_UNIQUE_YES = 1,
  VVLAB_NEITHER = 2,
} VvlabUniqueClassification;

// Opaque handle to a sampled hash-family member.
typedef struct VvlabHash VvlabHash;

// Opaque handle to a witness table with thresholds.
typedef struct VvlabInstance VvlabInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or null if
// none has occurred. Owned by the library; do not free.
const char *vvlab_last_error_message(void);

// Crate version as a static string; do not free.
const char *vvlab_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through an out-parameter of
// this library (or null), not yet freed.
void vvlab_string_free(char *s);

// JSON catalog of every experiment: name, parameters, defaults. Free the
// result with [`vvlab_string_free`].
//
// # Safety
// `json_out` must be a valid writable pointer.
VvlabStatus vvlab_catalog_json(char **json_out);

// Run a catalog experiment.
//
// `config_text` holds `key=value` lines (the CLI's `--config` format and
// parameter names); `out_dir` receives the CSV/JSON artifacts. On success
// `pass_out` is 1 when every embedded bound-check passed and
// `summary_json_out` (free with [`vvlab_string_free`]) carries the summary
// document.
//
// # Safety
// All pointer arguments must be valid; string arguments are NUL-terminated.
VvlabStatus vvlab_run_experiment(const char *name,
                                 const char *config_text,
                                 const char *out_dir,
                                 uint8_t *pass_out,
                                 char **summary_json_out);

// Draw a uniformly random member of the affine family
// `{0,1}^l -> {0,1}^m`, deterministically from `seed`.
//
// # Safety
// `hash_out` must be a valid writable pointer; free the handle with
// [`vvlab_hash_free`].
VvlabStatus vvlab_hash_sample(uint32_t input_bits,
                              uint32_t output_bits,
                              uint64_t seed,
                              VvlabHash **hash_out);

// Evaluate `h(y)`; the result's low `m` bits are the output string.
//
// # Safety
// `hash` must be a live handle from this library; `value_out` valid.
VvlabStatus vvlab_hash_evaluate(const VvlabHash *hash, uint64_t input, uint64_t *value_out);

// Serialize a hash to its text encoding (header plus hex rows). Free the
// string with [`vvlab_string_free`].
//
// # Safety
// `hash` must be a live handle; `text_out` valid.
VvlabStatus vvlab_hash_encode(const VvlabHash *hash, char **text_out);

// Parse a hash from its text encoding.
//
// # Safety
// `text` must be NUL-terminated; `hash_out` valid; free the handle with
// [`vvlab_hash_free`].
VvlabStatus vvlab_hash_decode(const char *text, VvlabHash **hash_out);

// Release a hash handle.
//
// # Safety
// `hash` must come from this library and not be freed twice.
void vvlab_hash_free(VvlabHash *hash);

// Parse an instance from the witness-table text format
// (`l=`, `p1=`, `p2=` headers then one probability per line).
//
// # Safety
// `text` NUL-terminated; `instance_out` valid; free with
// [`vvlab_instance_free`].
VvlabStatus vvlab_instance_from_text(const char *text, VvlabInstance **instance_out);

// Classify against the plain promise.
//
// # Safety
// `instance` must be a live handle; `class_out` valid.
VvlabStatus vvlab_instance_classify(const VvlabInstance *instance, VvlabClassification *class_out);

// Classify against the unique-witness promise.
//
// # Safety
// `instance` must be a live handle; `class_out` valid.
VvlabStatus vvlab_instance_classify_unique(const VvlabInstance *instance,
                                           VvlabUniqueClassification *class_out);

// Release an instance handle.
//
// # Safety
// `instance` must come from this library and not be freed twice.
void vvlab_instance_free(VvlabInstance *instance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VVLAB_H */
