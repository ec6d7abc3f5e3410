#ifndef GPTKIT_H
#define GPTKIT_H

/* Generated by cbindgen from gptkit-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum {
  GPT_STATUS_OK = 0,
  GPT_STATUS_INVALID_ARGUMENT = 1,
  GPT_STATUS_BAD_SPEC = 2,
  GPT_STATUS_COMPUTE_FAILED = 3,
} GptStatus;

/**
 * Opaque theory handle; create with `gpt_theory_new`, release with
 * `gpt_theory_free`.
 */
typedef struct GptTheory GptTheory;

/**
 * Message of the most recent error on this thread, or NULL when the last
 * call succeeded. The pointer stays valid until the next failing call on
 * the same thread; do not free it.
 */
const char *gpt_last_error(void);

/**
 * Creates a theory from a built-in name (`classical:<c>`, `quantum:<c>`,
 * `ball:<d2>`, `boxworld`, `boxworld-pair`) or from the JSON text of a
 * theory spec document (detected by a leading `{`).
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer; the
 * returned handle must be released with [`gpt_theory_free`].
 */
GptStatus gpt_theory_new(const char *spec, GptTheory **out);

/**
 * Releases a theory handle. NULL is ignored.
 *
 * # Safety
 * `theory` must be a pointer from [`gpt_theory_new`] not yet freed.
 */
void gpt_theory_free(GptTheory *theory);

/**
 * Name of the theory as a newly allocated string (free with
 * [`gpt_string_free`]).
 *
 * # Safety
 * `theory` must be a live handle and `out` a valid pointer.
 */
GptStatus gpt_theory_name(const GptTheory *theory, char **out);

/**
 * Runs requirement audits. `requirements` is a comma-separated subset of
 * `1,2,3,4,5,5p` (NULL audits all of them). The report JSON lands in
 * `out` (free with [`gpt_string_free`]); the verdict summary is the same
 * one the CLI maps to exit codes.
 *
 * # Safety
 * `theory` must be a live handle; `out` must be a valid pointer.
 */
GptStatus gpt_audit(const GptTheory *theory,
                    const char *requirements,
                    uint64_t seed,
                    uintptr_t samples,
                    char **out);

/**
 * Runs the theorem battery for the given orbit-rank grid (`grid` such as
 * `"3,5,7"`, NULL for the default).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
GptStatus gpt_theorems(uint64_t seed, const char *grid, char **out);

/**
 * Capacity certificate of the theory: the certified value and the
 * delta-condition residual of the returned measurement.
 *
 * # Safety
 * `theory` must be a live handle; `value` and `residual` must be valid
 * pointers.
 */
GptStatus gpt_capacity(const GptTheory *theory, uint64_t seed, uintptr_t *value, double *residual);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from a gptkit-capi function and not be freed twice.
 */
void gpt_string_free(char *s);

#endif  /* GPTKIT_H */
