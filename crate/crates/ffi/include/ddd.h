#ifndef DDD_FFI_H
#define DDD_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How depth is computed.
 */
typedef enum DddMethod {
  /**
   * Exact for d <= 2, random directions otherwise.
   */
  DDD_METHOD_AUTO = 0,
  DDD_METHOD_EXACT = 1,
  DDD_METHOD_APPROX = 2,
} DddMethod;

typedef enum DddStatistic {
  DDD_STATISTIC_KS = 0,
  DDD_STATISTIC_CVM = 1,
} DddStatistic;

/**
 * Outcome of a call.
 */
typedef enum DddStatus {
  DDD_STATUS_OK = 0,
  DDD_STATUS_NULL_POINTER = 1,
  DDD_STATUS_SHAPE = 2,
  DDD_STATUS_NON_FINITE = 3,
  DDD_STATUS_INSUFFICIENT_DATA = 4,
  DDD_STATUS_NON_INVERTIBLE_SCATTER = 5,
  DDD_STATUS_UNSUPPORTED_DIMENSION = 6,
  DDD_STATUS_PARAMETER = 7,
  DDD_STATUS_PRECONDITION = 8,
  DDD_STATUS_PARSE = 9,
  DDD_STATUS_IO = 10,
  DDD_STATUS_INTERNAL = 11,
} DddStatus;

/**
 * Probability law that can be sampled and tested against (opaque).
 */
typedef struct DddDistribution DddDistribution;

/**
 * Row-major real matrix (opaque).
 */
typedef struct DddMatrix DddMatrix;

/**
 * Result of a bootstrap test.
 */
typedef struct DddTestResult {
  double statistic;
  double p_value;
  /**
   * Replicates whose statistic exceeded the observed one.
   */
  size_t exceedances;
  size_t replicates;
} DddTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ddd_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ddd_last_error_message(void);

/**
 * Copies `n * d` row-major values into a new matrix.
 */
enum DddStatus ddd_matrix_new(const double *values, size_t n, size_t d, struct DddMatrix **out);

/**
 * Reads a numeric CSV file.
 */
enum DddStatus ddd_matrix_read_csv(const char *path, bool has_header, struct DddMatrix **out);

void ddd_matrix_free(struct DddMatrix *m);

/**
 * Number of rows, or 0 for NULL.
 */
size_t ddd_matrix_nrows(const struct DddMatrix *m);

/**
 * Number of columns, or 0 for NULL.
 */
size_t ddd_matrix_ncols(const struct DddMatrix *m);

/**
 * Borrowed pointer to the row-major values, valid while `m` lives.
 */
const double *ddd_matrix_data(const struct DddMatrix *m);

/**
 * Parses a distribution such as `standard-normal`, `t:3`, `cauchy`,
 * `laplace`, `normal:<mean>:<cov>` or `mixture:<w>@<spec>;...` in
 * dimension `d`.
 */
enum DddStatus ddd_distribution_parse(const char *spec, size_t d, struct DddDistribution **out);

void ddd_distribution_free(struct DddDistribution *p);

/**
 * Dimension of the distribution, or 0 for NULL.
 */
size_t ddd_distribution_dim(const struct DddDistribution *p);

/**
 * Draws `n` rows from `dist` using stream `(seed, 0)`.
 */
enum DddStatus ddd_sample(const struct DddDistribution *dist,
                          size_t n,
                          uint64_t seed,
                          struct DddMatrix **out);

/**
 * Depth of each row of `queries` with respect to `sample`, written to
 * `out_values[0..nrows(queries)]`. `directions` and `seed` only matter for
 * the approximate method.
 */
enum DddStatus ddd_depth(const struct DddMatrix *sample,
                         const struct DddMatrix *queries,
                         enum DddMethod method,
                         size_t directions,
                         uint64_t seed,
                         double *out_values,
                         size_t out_len);

/**
 * Bootstrap goodness-of-fit test of `x` against `f0`. `grid_size` is the
 * evaluation count M and `bootstrap` the replicate count B.
 */
enum DddStatus ddd_gof_test(const struct DddMatrix *x,
                            const struct DddDistribution *f0,
                            enum DddStatistic statistic,
                            size_t grid_size,
                            size_t bootstrap,
                            uint64_t seed,
                            struct DddTestResult *out);

/**
 * Bootstrap two-sample test of `x` against `y`.
 */
enum DddStatus ddd_twosample_test(const struct DddMatrix *x,
                                  const struct DddMatrix *y,
                                  enum DddStatistic statistic,
                                  size_t grid_size,
                                  size_t bootstrap,
                                  uint64_t seed,
                                  struct DddTestResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DDD_FFI_H */
