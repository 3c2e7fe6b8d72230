#ifndef ATLH_H
#define ATLH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AtlhScope {
  ATLH_SCOPE_OBJECTIVE = 0,
  ATLH_SCOPE_SUBJECTIVE = 1,
} AtlhScope;

/**
 * Result of every fallible call.
 */
typedef enum AtlhStatus {
  ATLH_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  ATLH_STATUS_NULL = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ATLH_STATUS_UTF8 = 2,
  /**
   * The formula text did not parse.
   */
  ATLH_STATUS_PARSE = 3,
  /**
   * The model text was invalid, or a generator rejected its parameters.
   */
  ATLH_STATUS_MODEL = 4,
  /**
   * Checking failed: unknown names or a strategy space above the cap.
   */
  ATLH_STATUS_CHECK = 5,
  /**
   * The translation exceeded its caps.
   */
  ATLH_STATUS_TRANSLATE = 6,
  /**
   * An argument was out of range.
   */
  ATLH_STATUS_ARG = 7,
  /**
   * The library panicked; the handle arguments are left untouched.
   */
  ATLH_STATUS_PANIC = 8,
} AtlhStatus;

typedef enum AtlhStrategyMode {
  /**
   * Memoryless strategies that agree on indistinguishable states.
   */
  ATLH_STRATEGY_MODE_UNIFORM = 0,
  /**
   * Memoryless strategies without the uniformity constraint.
   */
  ATLH_STRATEGY_MODE_NON_UNIFORM = 1,
} AtlhStrategyMode;

/**
 * Opaque formula handle.
 */
typedef struct AtlhFormula AtlhFormula;

/**
 * Opaque model handle.
 */
typedef struct AtlhModel AtlhModel;

/**
 * Options for [`atlh_check`]; obtain defaults from
 * [`atlh_check_options_default`].
 */
typedef struct AtlhCheckOptions {
  enum AtlhStrategyMode strategy_mode;
  enum AtlhScope scope;
  /**
   * Worker threads for strategy enumeration; 0 and 1 run inline.
   */
  size_t threads;
  /**
   * Largest strategy space that will be enumerated.
   */
  uint64_t strategy_cap;
  bool force_enumeration;
} AtlhCheckOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread; empty after a
 * successful call. Valid until the next call into the library on this
 * thread; do not free.
 */
const char *atlh_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void atlh_string_free(char *s);

/**
 * Parses a model in the text format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum AtlhStatus atlh_model_load(const char *text_ptr, struct AtlhModel **out);

/**
 * Serializes a model to the text format.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_model_save(const struct AtlhModel *model, char **out);

/**
 * Number of states of a model.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_model_num_states(const struct AtlhModel *model, size_t *out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void atlh_model_free(struct AtlhModel *model);

/**
 * Builds a named model: `fig1`, `m1`, `m2`, `threeballot`, `Mn` (uses
 * `n`) or `Nnj` (uses `n` and `j`). Unused parameters are ignored.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
enum AtlhStatus atlh_generate(const char *name, size_t n, size_t j, struct AtlhModel **out);

/**
 * Parses a formula.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum AtlhStatus atlh_formula_parse(const char *text_ptr, struct AtlhFormula **out);

/**
 * Releases a formula. Null is ignored.
 *
 * # Safety
 * `formula` must be null or a handle not yet freed.
 */
void atlh_formula_free(struct AtlhFormula *formula);

/**
 * Symbol count of a formula.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_formula_length(const struct AtlhFormula *formula, size_t *out);

/**
 * Prints a formula in the concrete syntax accepted by
 * [`atlh_formula_parse`].
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_formula_to_string(const struct AtlhFormula *formula, char **out);

struct AtlhCheckOptions atlh_check_options_default(void);

/**
 * Truth of `formula` at `state` (the initial state when null). `options`
 * may be null for defaults.
 *
 * # Safety
 * `model` and `formula` must be live handles; `state` must be null or a
 * nul-terminated string; `options` must be null or readable; `out` must be
 * writable.
 */
enum AtlhStatus atlh_check(const struct AtlhModel *model,
                           const struct AtlhFormula *formula,
                           const char *state,
                           const struct AtlhCheckOptions *options,
                           bool *out);

/**
 * Rewrites every uncertainty operator into knowledge operators.
 * `max_length` caps the result (0 for the default cap).
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_h_to_k(const struct AtlhFormula *formula,
                            size_t max_length,
                            struct AtlhFormula **out);

/**
 * Rewrites every knowledge operator into uncertainty operators.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum AtlhStatus atlh_k_to_h(const struct AtlhFormula *formula, struct AtlhFormula **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATLH_H */
