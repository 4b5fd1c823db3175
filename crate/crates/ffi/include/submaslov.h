#ifndef SUBMASLOV_H
#define SUBMASLOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Bit set in `SmInstant::flags` when the induced metric on the orthogonal complement is degenerate.
 */
#define SM_FLAG_DEGENERATE 1

/**
 * Bit set in `SmInstant::flags` when the instant is not isolated at the sampling resolution.
 */
#define SM_FLAG_CLUSTER 2

/**
 * Status codes returned by every fallible function.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_UTF8 = 2,
  /**
   * Unknown scenario, malformed or inconsistent configuration.
   */
  SM_STATUS_CONFIG = 3,
  /**
   * Integration or flow failure while running a scenario.
   */
  SM_STATUS_NUMERICAL = 4,
  /**
   * Index or level argument out of range.
   */
  SM_STATUS_OUT_OF_RANGE = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  SM_STATUS_PANIC = 6,
} SmStatus;

/**
 * Which curve a focal instant belongs to.
 */
typedef enum SmLevel {
  /**
   * The horizontal geodesic in the total space.
   */
  SM_LEVEL_TOTAL = 0,
  /**
   * Its projection in the base.
   */
  SM_LEVEL_BASE = 1,
} SmLevel;

/**
 * The outcome of `sm_run`.
 */
typedef struct SmResult SmResult;

/**
 * A scenario together with the tolerances it runs under.
 */
typedef struct SmScenario SmScenario;

/**
 * One focal instant. The contribution is `contribution_num / contribution_den`.
 */
typedef struct SmInstant {
  double t;
  uint32_t kernel_dim;
  int64_t contribution_num;
  int64_t contribution_den;
  uint32_t flags;
} SmInstant;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sm_version(void);

/**
 * Copy of the last error message on this thread, or NULL. Free with `sm_string_free`.
 */
char *sm_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sm_string_free(char *s);

/**
 * Built-in scenario `name` with default tolerances overridden by `SUBMASLOV_TOL_*`.
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be writable.
 */
enum SmStatus sm_scenario_builtin(const char *name, struct SmScenario **out);

/**
 * Scenario from a TOML run configuration, validated as by `submaslov check`.
 *
 * # Safety
 * `toml` must be NUL-terminated; `out` must be writable.
 */
enum SmStatus sm_scenario_from_toml(const char *toml, struct SmScenario **out);

/**
 * Overrides the number of integration steps.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum SmStatus sm_scenario_set_steps(struct SmScenario *scenario, uint32_t steps);

/**
 * # Safety
 * `scenario` must be NULL or a live handle; it is invalid afterwards.
 */
void sm_scenario_free(struct SmScenario *scenario);

/**
 * Integrates the geodesic and compares both Maslov indices.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_run(const struct SmScenario *scenario, struct SmResult **out);

/**
 * # Safety
 * `result` must be NULL or a live handle; it is invalid afterwards.
 */
void sm_result_free(struct SmResult *result);

/**
 * `μ_𝒬(γ)` and `μ_𝒫(x)` as numerator / denominator pairs.
 *
 * # Safety
 * `result` must be a live handle; the out pointers must be writable.
 */
enum SmStatus sm_result_indices(const struct SmResult *result,
                                int64_t *mu_q_num,
                                int64_t *mu_q_den,
                                int64_t *mu_p_num,
                                int64_t *mu_p_den);

/**
 * 1 if every check passed, 0 otherwise.
 *
 * # Safety
 * `result` must be a live handle; `pass` must be writable.
 */
enum SmStatus sm_result_pass(const struct SmResult *result, int32_t *pass);

/**
 * Number of focal instants at `level`.
 *
 * # Safety
 * `result` must be a live handle; `count` must be writable.
 */
enum SmStatus sm_result_instant_count(const struct SmResult *result,
                                      enum SmLevel level,
                                      size_t *count);

/**
 * The `index`-th focal instant at `level`, in increasing `t`.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_result_instant(const struct SmResult *result,
                                enum SmLevel level,
                                size_t index,
                                struct SmInstant *out);

/**
 * Focal-instant CSV, identical to the file written by `submaslov run`. Free with `sm_string_free`.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_result_csv(const struct SmResult *result, char **out);

/**
 * Full result as JSON. Free with `sm_string_free`.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_result_json(const struct SmResult *result, char **out);

/**
 * Human-readable summary. Free with `sm_string_free`.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_result_summary(const struct SmResult *result, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBMASLOV_H */
