#pragma once

#include <stdint.h>
#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes for every fallible call.
 */
typedef enum KfStatus {
  KF_STATUS_OK = 0,
  /**
   * Malformed arguments: bad JSON, bad UTF-8, null pointers.
   */
  KF_STATUS_INVALID_INPUT = 1,
  /**
   * Mathematically out of domain for the operation.
   */
  KF_STATUS_DOMAIN = 2,
  /**
   * A documented precondition was violated.
   */
  KF_STATUS_PRECONDITION = 3,
  /**
   * Desk-scale resource limit exceeded.
   */
  KF_STATUS_RESOURCE = 4,
  /**
   * 64-bit coordinate overflow.
   */
  KF_STATUS_OVERFLOW = 5,
  /**
   * Internal invariant failure.
   */
  KF_STATUS_INTERNAL = 6,
} KfStatus;

/**
 * Opaque sieved point set.
 */
typedef struct KfPointSet KfPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message raised on this thread, or NULL. Free with
 * [`kf_string_free`].
 */
char *kf_last_error_message(void);

/**
 * Frees a string returned by this library.
 */
void kf_string_free(char *s);

/**
 * Sieves the window [−radius, radius]^d of the spec (JSON) into a new
 * point-set handle.
 */
enum KfStatus kf_pointset_sieve(const char *spec_json,
                                int64_t radius,
                                uint32_t threads,
                                struct KfPointSet **out);

/**
 * Parses a point set from its JSON serialization.
 */
enum KfStatus kf_pointset_from_json(const char *json, struct KfPointSet **out);

uint64_t kf_pointset_len(const struct KfPointSet *ps);

uint8_t kf_pointset_dim(const struct KfPointSet *ps);

/**
 * Copies the flattened coordinates (len·dim values) into `buf` when its
 * capacity suffices; returns the number of values required either way.
 */
uint64_t kf_pointset_coords(const struct KfPointSet *ps, int64_t *buf, uint64_t capacity);

/**
 * Serializes the handle to pointset/1 JSON. Free with [`kf_string_free`].
 */
enum KfStatus kf_pointset_to_json(const struct KfPointSet *ps, char **out);

/**
 * Exact member density of the window as a reduced fraction.
 */
enum KfStatus kf_pointset_density(const struct KfPointSet *ps,
                                  uint64_t *numerator,
                                  uint64_t *denominator);

void kf_pointset_free(struct KfPointSet *ps);

/**
 * Riemann zeta with guaranteed absolute error ≤ tol (s ≥ 1.5).
 */
enum KfStatus kf_zeta(double s, double tol, double *out);

/**
 * Theoretical density of the spec; `is_extension` is set when the value
 * is a truncated Euler product rather than a closed form.
 */
enum KfStatus kf_theoretical_density(const char *spec_json,
                                     uint64_t euler_norm_limit,
                                     double *out,
                                     bool *is_extension);

/**
 * Topological entropy constant of the spec (density·log 2).
 */
enum KfStatus kf_entropy(const char *spec_json, double *out, bool *is_extension);

/**
 * Admissibility of a flattened point list (n_points × dim coordinates).
 * `report_json` (optional) receives the certificate report.
 */
enum KfStatus kf_admissible(const char *spec_json,
                            const int64_t *coords,
                            uintptr_t n_points,
                            bool *verdict,
                            char **report_json);

/**
 * Locator search; `found` reports whether a translate was returned, and
 * the JSON carries the translate / impossibility certificate.
 */
enum KfStatus kf_locate(const char *spec_json,
                        const int64_t *p_coords,
                        uintptr_t p_len,
                        const int64_t *q_coords,
                        uintptr_t q_len,
                        int64_t radius,
                        bool crt_guided,
                        bool *found,
                        char **outcome_json);

/**
 * Truncated locator-density lower bound for an admissible pattern.
 */
enum KfStatus kf_locator_density_bound(const char *spec_json,
                                       const int64_t *p_coords,
                                       uintptr_t p_len,
                                       uint64_t truncation,
                                       double *out);

/**
 * Stabiliser search; `exact` is set when the passed matrices equal the
 * predicted group slice, and the JSON carries the full stabreport/1.
 */
enum KfStatus kf_stab_search(const char *spec_json,
                             int64_t entry_bound,
                             int64_t radius,
                             uint32_t threads,
                             bool *exact,
                             char **report_json);

/**
 * Inadmissible-image witness for a non-stabiliser matrix (row-major
 * entries). The JSON carries the witness/1 object with both verdicts.
 */
enum KfStatus kf_witness(const char *ring,
                         uint32_t k,
                         const int64_t *matrix_rowmajor,
                         int64_t max_shell,
                         char **witness_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
