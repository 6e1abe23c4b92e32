#ifndef TWOPROVER_H
#define TWOPROVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TpStatus {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_INVALID_UTF8 = 2,
  TP_STATUS_PARSE = 3,
  TP_STATUS_VALIDATION = 4,
  TP_STATUS_INVALID = 5,
  TP_STATUS_SIZE_GUARD = 6,
  TP_STATUS_WRONG_KIND = 7,
  TP_STATUS_NUMERICAL = 8,
  TP_STATUS_IO = 9,
  TP_STATUS_PANIC = 10,
} TpStatus;

typedef enum TpGameKind {
  TP_GAME_KIND_TWO_PROVER_ONE_ROUND = 0,
  TP_GAME_KIND_MULTI_ROUND = 1,
  TP_GAME_KIND_PCP3 = 2,
} TpGameKind;

typedef enum TpValueKind {
  TP_VALUE_KIND_CLASSICAL = 0,
  TP_VALUE_KIND_NO_SIGNALING = 1,
  TP_VALUE_KIND_MULTI_ROUND = 2,
  TP_VALUE_KIND_PCP = 3,
} TpValueKind;

typedef enum TpTransformKind {
  TP_TRANSFORM_KIND_ORACULARIZE = 0,
  TP_TRANSFORM_KIND_ORACULARIZE_DUMMY = 1,
  TP_TRANSFORM_KIND_REPEAT = 2,
} TpTransformKind;

/**
 * Opaque game handle.
 */
typedef struct TpGame TpGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *tp_last_error(void);

/**
 * Library version as a static string.
 */
const char *tp_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tp_string_free(char *s);

/**
 * Parses a game file's text into a new handle.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum TpStatus tp_game_parse(const char *text, struct TpGame **out);

/**
 * A built-in game: `chsh`, `magic-square`, `magic-square-rc` or `tiny-1in3`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum TpStatus tp_game_catalog(const char *name, struct TpGame **out);

/**
 * # Safety
 * `game` must be NULL or a handle from this library not yet freed.
 */
void tp_game_free(struct TpGame *game);

/**
 * # Safety
 * `game` and `out` must be valid pointers.
 */
enum TpStatus tp_game_kind(const struct TpGame *game, enum TpGameKind *out);

/**
 * Serializes to the game file format.
 *
 * # Safety
 * `game` and `out` must be valid pointers.
 */
enum TpStatus tp_game_serialize(const struct TpGame *game, char **out);

/**
 * Exact value. `exact_out` receives `"p/q"` text (free with
 * [`tp_string_free`]); `float_out` may be NULL.
 *
 * # Safety
 * `game` and `exact_out` must be valid; `float_out` valid or NULL.
 */
enum TpStatus tp_value(const struct TpGame *game,
                       enum TpValueKind kind,
                       char **exact_out,
                       double *float_out);

/**
 * See-saw lower bound on the entangled value with local dimensions `d1`
 * and `d2`.
 *
 * # Safety
 * `game` and `out` must be valid pointers.
 */
enum TpStatus tp_entangled_lower_bound(const struct TpGame *game,
                                       size_t d1,
                                       size_t d2,
                                       size_t restarts,
                                       uint64_t seed,
                                       double *out);

/**
 * Transforms into a new two-prover game. `copies` is used by `Repeat`.
 *
 * # Safety
 * `game` and `out` must be valid pointers.
 */
enum TpStatus tp_transform(const struct TpGame *game,
                           enum TpTransformKind kind,
                           size_t copies,
                           struct TpGame **out);

/**
 * Runs a verification suite by name. `samples == 0` uses the suite's
 * default. Writes the number of holding and total inequalities.
 *
 * # Safety
 * `suite` must be a nul-terminated string; `holding` and `total` valid.
 */
enum TpStatus tp_verify(const char *suite,
                        uint64_t seed,
                        size_t samples,
                        size_t *holding,
                        size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOPROVER_H */
