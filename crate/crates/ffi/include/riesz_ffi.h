#ifndef RIESZ_FFI_H
#define RIESZ_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Which identity a handle evaluates.
 */
typedef enum RzCaseKind {
  RZ_CASE_KIND_VORONOI = 0,
  RZ_CASE_KIND_RAMANUJAN = 1,
  RZ_CASE_KIND_T3_1 = 2,
  RZ_CASE_KIND_T3_2 = 3,
  RZ_CASE_KIND_T3_3 = 4,
  RZ_CASE_KIND_T5_1 = 5,
  RZ_CASE_KIND_T5_2 = 6,
  RZ_CASE_KIND_T5_3 = 7,
  RZ_CASE_KIND_COROLLARY = 8,
} RzCaseKind;

/*
 Result codes shared by every function.
 */
typedef enum RzStatus {
  RZ_STATUS_OK = 0,
  RZ_STATUS_INVALID_ARGUMENT = 1,
  RZ_STATUS_DOMAIN = 2,
  RZ_STATUS_POLE = 3,
  RZ_STATUS_HYPOTHESIS = 4,
  RZ_STATUS_NON_CONVERGENCE = 5,
  RZ_STATUS_DEGENERATE_GRID = 6,
  RZ_STATUS_NULL_POINTER = 7,
  RZ_STATUS_PANIC = 8,
} RzStatus;

/*
 Opaque identity handle.
 */
typedef struct RzCase RzCase;

/*
 Parameters for [`rz_case_new`]. Fields a case does not use are ignored.

 `disc` is the field discriminant for the T3 cases (0 selects the
 rationals) and the character discriminant D for T5 and the corollary.
 `q`, `h` give theta = h/q; `q`, `chi_index` pick the character for T3_1
 and T5_1.
 */
typedef struct RzCaseParams {
  enum RzCaseKind kind;
  int64_t disc;
  uint64_t q;
  uint64_t h;
  uint64_t chi_index;
  double rho;
} RzCaseParams;

/*
 Flat view of a verification run. `series` is the last partial of the
 series side.
 */
typedef struct RzReport {
  double x;
  double lhs;
  double lhs_im;
  double rhs_main;
  double rhs_main_im;
  double series;
  double series_im;
  double series_cap;
  double residual;
  double tail_estimate;
  double kernel_error;
  bool converged;
} RzReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds a case handle. On success `*out` owns a handle to release with
 [`rz_case_free`]; on failure `*out` is null.

 # Safety
 `params` must point to a valid `RzCaseParams` and `out` to writable
 storage for one pointer.
 */
enum RzStatus rz_case_new(const struct RzCaseParams *params, struct RzCase **out);

/*
 Releases a handle from [`rz_case_new`]. Null is ignored.

 # Safety
 `case` must be null or a handle not yet freed.
 */
void rz_case_free(struct RzCase *case_);

/*
 Evaluates both sides of the identity at `x` with adaptive smooth
 summation. `max_n` caps the series length; 0 keeps the default.

 On `RzStatus::NonConvergence` the best report found is still written to
 `*out` when one exists, with `converged` false.

 # Safety
 `case` must be a live handle and `out` must point to writable storage.
 */
enum RzStatus rz_verify(const struct RzCase *case_,
                        double x,
                        double tol,
                        uint64_t max_n,
                        struct RzReport *out);

/*
 The Meijer G kernel of order `m` at `y`, with its estimated absolute
 error. `abs_error` may be null.

 # Safety
 `value` must point to writable storage; `abs_error` must be null or
 writable.
 */
enum RzStatus rz_g_kernel(uint32_t m, double rho, double y, double *value, double *abs_error);

/*
 LHS minus the main term at `x`, for the T3_3 and T5_3 cosine sums.

 # Safety
 `case` must be a live handle and `out` must point to writable storage.
 */
enum RzStatus rz_error_term(const struct RzCase *case_, double x, double *out);

/*
 Copies the calling thread's last error message into `buf` as a
 NUL-terminated string, truncating to `len - 1` bytes. Returns the length
 the full message needs including the terminator, so a caller can pass a
 null `buf` to size it.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t rz_last_error(char *buf, size_t len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RIESZ_FFI_H */
