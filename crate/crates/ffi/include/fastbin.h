#ifndef FASTBIN_H
#define FASTBIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FastbinStatus {
  FASTBIN_STATUS_OK = 0,
  // A required pointer argument was null.
  FASTBIN_STATUS_NULL_POINTER = 1,
  // Fewer than two boundaries.
  FASTBIN_STATUS_TOO_FEW_BOUNDARIES = 2,
  // Boundaries are not strictly increasing.
  FASTBIN_STATUS_NOT_STRICTLY_INCREASING = 3,
  // A boundary is NaN or infinite.
  FASTBIN_STATUS_NON_FINITE_BOUNDARY = 4,
  // A value to bin is NaN or infinite.
  FASTBIN_STATUS_NON_FINITE_INPUT = 5,
  // A bug inside the library; the call had no effect.
  FASTBIN_STATUS_INTERNAL = 6,
} FastbinStatus;

// Opaque binner handle. Immutable after creation.
typedef struct FastbinBinner FastbinBinner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Validates `len` boundaries at `boundaries` and builds a binner with
// `len - 1 + extra_cells` grid cells. On success `*out` owns the handle,
// which must be released with `fastbin_binner_free`.
//
// # Safety
// `boundaries` must point to `len` readable doubles and `out` must be
// writable.
enum FastbinStatus fastbin_binner_new(const double *boundaries,
                                      size_t len,
                                      size_t extra_cells,
                                      struct FastbinBinner **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `binner` must come from `fastbin_binner_new` and not be used afterwards.
void fastbin_binner_free(struct FastbinBinner *binner);

// Number of bins, or 0 for a null handle.
//
// # Safety
// `binner` must be null or a live handle.
size_t fastbin_binner_num_bins(const struct FastbinBinner *binner);

// Number of grid cells, or 0 for a null handle.
//
// # Safety
// `binner` must be null or a live handle.
size_t fastbin_binner_cells(const struct FastbinBinner *binner);

// Bins one value into `*out_index`: 0 below the range, `num_bins + 1` at or
// above its top, otherwise the 1-based bin.
//
// # Safety
// `binner` must be a live handle and `out_index` writable.
enum FastbinStatus fastbin_bin_value(const struct FastbinBinner *binner,
                                     double x,
                                     size_t *out_index);

// Bins `len` values into `out`. On `FASTBIN_STATUS_NON_FINITE_INPUT` the
// first offending position is stored in `*error_index` (if non-null) and
// the contents of `out` are unspecified.
//
// # Safety
// `values` must hold `len` readable doubles, `out` room for `len` writable
// `size_t`, and the two must not overlap.
enum FastbinStatus fastbin_bin_slice(const struct FastbinBinner *binner,
                                     const double *values,
                                     size_t len,
                                     size_t *out,
                                     size_t *error_index);

// Reference binary search over `len` boundaries, validated on every call.
//
// # Safety
// `boundaries` must hold `len` readable doubles and `out_index` be writable.
enum FastbinStatus fastbin_binary_search_bin(const double *boundaries,
                                             size_t len,
                                             double x,
                                             size_t *out_index);

// Static, NUL-terminated description of a status code. Codes outside
// `FastbinStatus` give "unknown status".
const char *fastbin_status_message(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FASTBIN_H */
