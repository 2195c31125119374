#ifndef GREEDY_LAB_H
#define GREEDY_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GlStatus {
  GL_STATUS_OK = 0,
  GL_STATUS_NULL_POINTER = 1,
  GL_STATUS_INVALID_UTF8 = 2,
  // Malformed vector, set, space or weight text, or an unknown name.
  GL_STATUS_PARSE = 3,
  GL_STATUS_INVALID_ARGUMENT = 4,
  GL_STATUS_OUTSIDE_WINDOW = 5,
  // The engine has no exact evaluation; use the `_f64` variant.
  GL_STATUS_MODE_UNSUPPORTED = 6,
  // A claim that cannot run with the given space, weight or window.
  GL_STATUS_NOT_APPLICABLE = 7,
  GL_STATUS_INTERNAL = 8,
  GL_STATUS_PANIC = 9,
} GlStatus;

// A norm engine built from a space description such as `lp:2` or `spreading:3`.
typedef struct GlEngine GlEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds an engine; `space` takes the same forms as the command line (`lp:inf`,
// `partial_sum@12`, `modular@10`, `modular:1,2,4`, or a JSON object).
//
// # Safety
// `space` must be a valid C string and `out` a valid pointer.
enum GlStatus gl_engine_new(const char *space, struct GlEngine **out);

// # Safety
// `engine` must come from [`gl_engine_new`] and not be used afterwards. Null is ignored.
void gl_engine_free(struct GlEngine *engine);

// Canonical name of the engine, e.g. `spreading:3`.
//
// # Safety
// `engine` must be live and `out` valid.
enum GlStatus gl_engine_name(const struct GlEngine *engine, char **out);

// Exact norm as a reduced fraction string.
//
// # Safety
// `engine` must be live, `vector` a valid C string and `out` valid.
enum GlStatus gl_norm(const struct GlEngine *engine, const char *vector, char **out);

// # Safety
// `engine` must be live, `vector` a valid C string and `out` valid.
enum GlStatus gl_norm_f64(const struct GlEngine *engine, const char *vector, double *out);

// Exact dual norm on a spreading engine, as a fraction string.
//
// # Safety
// `engine` must be live, `vector` a valid C string and `out` valid.
enum GlStatus gl_dual_norm(const struct GlEngine *engine, const char *vector, char **out);

// Greedy sets of size `m` with approximants and residual norms, as JSON. `ties` is
// `lowest-index` or `enumerate`; null means `lowest-index`. Exact where the engine allows.
//
// # Safety
// `engine` must be live, `vector` a valid C string, `ties` null or a valid C string, `out` valid.
enum GlStatus gl_tga_run(const struct GlEngine *engine,
                         const char *vector,
                         size_t m,
                         const char *ties,
                         char **out);

// Checks one claim and writes its report as JSON. `weight` null selects the claim's own
// weight; `window` 0 selects the engine's window. `passed` may be null.
//
// # Safety
// `engine` must be live, `id` a valid C string, `weight` null or a valid C string,
// `out` valid and `passed` null or valid.
enum GlStatus gl_verify_claim(const struct GlEngine *engine,
                              const char *id,
                              const char *weight,
                              size_t window,
                              size_t samples,
                              uint64_t seed,
                              char **out,
                              bool *passed);

// Recomputes the reference values of the example spaces; JSON report.
//
// # Safety
// `out` must be valid; `passed` null or valid.
enum GlStatus gl_reproduce_examples(uint64_t seed, char **out, bool *passed);

// The claim registry as a JSON array, optionally restricted by id, alias or group.
//
// # Safety
// `filter` must be null or a valid C string, `out` valid.
enum GlStatus gl_list_claims(const char *filter, char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void gl_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until the next call
// into this library on the same thread; do not free.
const char *gl_last_error_message(void);

// Library version, static; do not free.
const char *gl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREEDY_LAB_H */
