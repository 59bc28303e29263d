#ifndef TILEDQR_H
#define TILEDQR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum TqrStatus {
  TqrOk = 0,
  /**
   * A pointer argument was null or an argument value was out of range.
   */
  TqrInvalidArgument = 1,
  /**
   * The grid shape is not a valid p x q tiling.
   */
  TqrInvalidShape = 2,
  /**
   * The elimination list violates an ordering or pivot rule.
   */
  TqrInvalidList = 3,
  /**
   * Text input could not be parsed.
   */
  TqrParseError = 4,
  /**
   * The scheme name is unknown or not applicable to the operation.
   */
  TqrUnknownScheme = 5,
} TqrStatus;

/**
 * Opaque handle to an elimination list (an ordered sequence of row
 * eliminations on a p x q tile grid).
 */
typedef struct TqrList TqrList;

/**
 * Generate the elimination list of a named scheme on a p x q grid and store
 * a new handle in `out`.
 *
 * `scheme` is one of "flattree", "fibonacci", "greedy", "binarytree",
 * "plasmatree", "asap", "grasap". `param` is the domain size for
 * "plasmatree" and the column switch point for "grasap"; it is ignored for
 * the other schemes. `family` ("tt" or "ts") only affects the decisions of
 * the dynamic schemes ("asap", "grasap").
 *
 * # Safety
 * `scheme` and `family` must be valid NUL-terminated strings and `out` a
 * valid pointer; on `TqrOk` the caller owns the handle and must release it
 * with [`tqr_list_free`].
 */
enum TqrStatus tqr_list_generate(const char *scheme,
                                 uintptr_t p,
                                 uintptr_t q,
                                 uintptr_t param,
                                 const char *family,
                                 struct TqrList **out);

/**
 * Parse an elimination list from its text form (header "p q", then one
 * "k i piv" triple per line) and store a new handle in `out`. The parsed
 * list is also validated.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer;
 * on `TqrOk` the caller owns the handle and must release it with
 * [`tqr_list_free`].
 */
enum TqrStatus tqr_list_parse(const char *text, struct TqrList **out);

/**
 * Render a list in the same text form accepted by [`tqr_list_parse`].
 * Returns a newly allocated string, or NULL if `list` is NULL; the caller
 * must release it with [`tqr_string_free`].
 *
 * # Safety
 * `list` must be NULL or a live handle from this library.
 */
char *tqr_list_to_text(const struct TqrList *list);

/**
 * Check the ordering and pivot rules of a list: `TqrOk` if valid,
 * `TqrInvalidList` otherwise.
 *
 * # Safety
 * `list` must be NULL or a live handle from this library.
 */
enum TqrStatus tqr_list_validate(const struct TqrList *list);

/**
 * Rewrite a list so that every elimination pivots on a higher row
 * (`row > piv`) without changing its execution time, storing a new handle
 * in `out`. The input handle is left untouched.
 *
 * # Safety
 * `list` must be a live handle and `out` a valid pointer; on `TqrOk` the
 * caller owns the new handle and must release it with [`tqr_list_free`].
 */
enum TqrStatus tqr_list_normalize(const struct TqrList *list, struct TqrList **out);

/**
 * Total kernel work of any complete factorization of the list's grid, in
 * time-units (6pq^2 - 2q^3, independent of the elimination order and kernel
 * family). Returns 0 if `list` is NULL.
 *
 * # Safety
 * `list` must be NULL or a live handle from this library.
 */
uint64_t tqr_list_total_weight(const struct TqrList *list);

/**
 * Simulate the list's kernel task graph and store the makespan in `out`.
 * `family` is "tt" or "ts"; `processors` is the processor count, with 0
 * meaning unbounded.
 *
 * # Safety
 * `list` must be a live handle, `family` a valid NUL-terminated string and
 * `out` a valid pointer.
 */
enum TqrStatus tqr_list_makespan(const struct TqrList *list,
                                 const char *family,
                                 uintptr_t processors,
                                 uint64_t *out);

/**
 * Critical path (unbounded-processor makespan) of a named scheme on a p x q
 * grid, stored in `out`. Arguments as in [`tqr_list_generate`].
 *
 * # Safety
 * `scheme` and `family` must be valid NUL-terminated strings and `out` a
 * valid pointer.
 */
enum TqrStatus tqr_critical_path(const char *scheme,
                                 uintptr_t p,
                                 uintptr_t q,
                                 uintptr_t param,
                                 const char *family,
                                 uint64_t *out);

/**
 * Predicted parallel rate gamma_seq * T / max(T/P, cp) in Gflop/s for a
 * factorization with total work `total` time-units and critical path `cp`
 * on `processors` processors. Stores the rate in `out_gflops` and writes 1
 * to `out_work_bound` when the work term T/P dominates (prediction equals
 * gamma_seq * P), 0 when the critical path dominates.
 *
 * # Safety
 * `out_gflops` and `out_work_bound` must be valid pointers.
 */
enum TqrStatus tqr_predict(double gamma_seq,
                           uintptr_t processors,
                           uintptr_t n_b,
                           uintptr_t p,
                           uintptr_t q,
                           uint64_t cp,
                           uint64_t total,
                           double *out_gflops,
                           int32_t *out_work_bound);

/**
 * Release a list handle. NULL is a no-op.
 *
 * # Safety
 * `list` must be NULL or a handle returned by this library that has not
 * already been freed.
 */
void tqr_list_free(struct TqrList *list);

/**
 * Release a string returned by [`tqr_list_to_text`]. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library that has not
 * already been freed.
 */
void tqr_string_free(char *s);

#endif /* TILEDQR_H */
