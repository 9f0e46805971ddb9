#ifndef FORMULA_LIFT_H
#define FORMULA_LIFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FlStatus {
  FL_STATUS_OK = 0,
  FL_STATUS_NULL_ARGUMENT = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  FL_STATUS_SYNTAX = 3,
  FL_STATUS_FORMAT = 4,
  FL_STATUS_DIMENSION = 5,
  FL_STATUS_LIMIT_EXCEEDED = 6,
  FL_STATUS_NOT_REDUCED = 7,
  FL_STATUS_EMPTY_INPUT = 8,
  FL_STATUS_UNBOUNDED = 9,
  FL_STATUS_INFEASIBLE = 10,
  FL_STATUS_INVALID = 11,
  FL_STATUS_PANIC = 12,
} FlStatus;

/**
 * A parsed Boolean formula.
 */
typedef struct FlFormula FlFormula;

/**
 * An extended formulation `{x : ∃y, Ay ≥ b, x = Ty + t}`.
 */
typedef struct FlPolytope FlPolytope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *fl_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fl_string_free(char *s);

/**
 * Parses a formula over `n` variables; `n = 0` infers it from the largest index.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum FlStatus fl_formula_parse(const char *text, size_t n, struct FlFormula **out);

/**
 * # Safety
 * `f` must come from this library and not have been freed; null is ignored.
 */
void fl_formula_free(struct FlFormula *f);

/**
 * Equivalent formula with negations only on literals.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum FlStatus fl_formula_reduce(const struct FlFormula *f, struct FlFormula **out);

/**
 * Number of literal leaves.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum FlStatus fl_formula_size(const struct FlFormula *f, size_t *out);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum FlStatus fl_formula_nvars(const struct FlFormula *f, size_t *out);

/**
 * Canonical text of the formula.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum FlStatus fl_formula_to_string(const struct FlFormula *f, char **out);

/**
 * Evaluates at `x`, given as `len` bytes that are 0 or nonzero.
 *
 * # Safety
 * `x` must point to `len` readable bytes and `out` be writable.
 */
enum FlStatus fl_formula_evaluate(const struct FlFormula *f,
                                  const uint8_t *x,
                                  size_t len,
                                  bool *out);

/**
 * The unit cube `[0,1]^n`. Never fails.
 */
struct FlPolytope *fl_polytope_cube(size_t n);

/**
 * Reads the EF text format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum FlStatus fl_polytope_parse(const char *text, struct FlPolytope **out);

/**
 * # Safety
 * `p` must come from this library and not have been freed; null is ignored.
 */
void fl_polytope_free(struct FlPolytope *p);

/**
 * Writes the EF text format.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum FlStatus fl_polytope_to_text(const struct FlPolytope *p, char **out);

/**
 * Number of inequality rows.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum FlStatus fl_polytope_rows(const struct FlPolytope *p, size_t *out);

/**
 * `φ^rounds(Q)`; the formula must be reduced.
 *
 * # Safety
 * `f` and `q` must be live handles and `out` writable.
 */
enum FlStatus fl_lift(const struct FlFormula *f,
                      const struct FlPolytope *q,
                      size_t rounds,
                      struct FlPolytope **out);

/**
 * Optimal value of `c·x` over the polytope, as exact text. Returns
 * `FL_STATUS_INFEASIBLE` or `FL_STATUS_UNBOUNDED` when there is no optimum.
 *
 * # Safety
 * `p` must be a live handle, `objective` a nul-terminated string and `out` writable.
 */
enum FlStatus fl_optimize(const struct FlPolytope *p,
                          const char *objective,
                          bool minimize,
                          char **out);

/**
 * Whether the point (comma separated rationals) lies in the polytope.
 *
 * # Safety
 * `p` must be a live handle, `point` a nul-terminated string and `out` writable.
 */
enum FlStatus fl_contains(const struct FlPolytope *p, const char *point, bool *out);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum FlStatus fl_is_empty(const struct FlPolytope *p, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMULA_LIFT_H */
