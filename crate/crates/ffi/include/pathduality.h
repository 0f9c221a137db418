#ifndef PATHDUALITY_H
#define PATHDUALITY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdRelation {
  PD_RELATION_L1_MEMORY = 0,
  PD_RELATION_L1_NO_MEMORY = 1,
  PD_RELATION_TWO_PATH_EQUALITY = 2,
  PD_RELATION_MIXED_STATE = 3,
  PD_RELATION_ENTROPIC_NO_MEMORY = 4,
  PD_RELATION_ENTROPIC_MEMORY = 5,
  PD_RELATION_ACCESSIBLE = 6,
  PD_RELATION_WITNESS_PURITY = 7,
  PD_RELATION_WITNESS_COND_ENT = 8,
} PdRelation;

typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_NULL_POINTER = 1,
  PD_STATUS_INVALID_ARGUMENT = 2,
  PD_STATUS_INVALID_INPUT = 3,
  PD_STATUS_PRECONDITION = 4,
  PD_STATUS_PARSE = 5,
  PD_STATUS_IO = 6,
  PD_STATUS_PANIC = 7,
} PdStatus;

/**
 * Opaque pure-state ensemble.
 */
typedef struct PdEnsemble PdEnsemble;

/**
 * Opaque interferometer scenario.
 */
typedef struct PdScenario PdScenario;

typedef struct PdReport {
  double lhs;
  double rhs;
  /**
   * `rhs - lhs`
   */
  double slack;
  bool satisfied;
  bool certified;
  /**
   * All intermediate derivation checks held.
   */
  bool aux_ok;
} PdReport;

typedef struct PdWitnesses {
  /**
   * `Tr ρ_A² - Tr ρ_AB²`
   */
  double purity_witness;
  /**
   * `S(B|A)` in bits
   */
  double cond_ent_witness;
} PdWitnesses;

typedef struct PdDiscrimination {
  double p_success;
  double certificate_gap;
  double dual_bound;
  uint64_t iterations;
  bool converged;
  bool certified;
} PdDiscrimination;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pd_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *pd_last_error_message(void);

/**
 * Haar-random scenario, deterministic in `seed`.
 *
 * # Safety
 * `out_handle` must be a valid pointer to writable storage for one handle.
 */
enum PdStatus pd_scenario_sample(uint64_t seed,
                                 size_t n,
                                 size_t d_b,
                                 size_t d_d,
                                 struct PdScenario **out_handle);

/**
 * Reads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_handle` must be writable.
 */
enum PdStatus pd_scenario_load(const char *path, struct PdScenario **out_handle);

/**
 * Scenario from row-major arrays: amplitudes `n × d_b`, detector states
 * `n × d_d`, real and imaginary parts separately.
 *
 * # Safety
 * Each array must hold the stated number of doubles; `out_handle` must be writable.
 */
enum PdStatus pd_scenario_from_arrays(size_t n,
                                      size_t d_b,
                                      size_t d_d,
                                      const double *amp_re,
                                      const double *amp_im,
                                      const double *det_re,
                                      const double *det_im,
                                      struct PdScenario **out_handle);

/**
 * # Safety
 * `s` must come from a `pd_scenario_*` constructor and not be freed twice.
 */
void pd_scenario_free(struct PdScenario *s);

/**
 * # Safety
 * `s` must be a live handle; out-pointers must be writable.
 */
enum PdStatus pd_scenario_dims(const struct PdScenario *s, size_t *n, size_t *d_b, size_t *d_d);

/**
 * Evaluates one duality relation (a `PdRelation` value) with default
 * tolerances.
 *
 * # Safety
 * `s` must be a live handle; `report` must be writable.
 */
enum PdStatus pd_scenario_check(const struct PdScenario *s,
                                int32_t relation,
                                struct PdReport *report);

/**
 * Entanglement witnesses of the particle-memory state after the detector.
 *
 * # Safety
 * `s` must be a live handle; `w` must be writable.
 */
enum PdStatus pd_scenario_witnesses(const struct PdScenario *s, struct PdWitnesses *w);

/**
 * Ensemble of `m` pure states in dimension `dim`; states row-major `m × dim`.
 *
 * # Safety
 * `probs` holds `m` doubles, `re`/`im` hold `m * dim`; `out_handle` must be writable.
 */
enum PdStatus pd_ensemble_new(size_t m,
                              size_t dim,
                              const double *probs,
                              const double *re,
                              const double *im,
                              struct PdEnsemble **out_handle);

/**
 * The detector ensemble `{p_i, |φ_i⟩}` of a scenario.
 *
 * # Safety
 * `s` must be a live handle; `out_handle` must be writable.
 */
enum PdStatus pd_ensemble_from_scenario(const struct PdScenario *s, struct PdEnsemble **out_handle);

/**
 * # Safety
 * `e` must come from a `pd_ensemble_*` constructor and not be freed twice.
 */
void pd_ensemble_free(struct PdEnsemble *e);

/**
 * Certified minimum-error discrimination.
 *
 * # Safety
 * `e` must be a live handle; `result` must be writable.
 */
enum PdStatus pd_min_error(const struct PdEnsemble *e, struct PdDiscrimination *result);

/**
 * Closed-form optimum for a two-state ensemble.
 *
 * # Safety
 * `e` must be a live handle; `p_success` must be writable.
 */
enum PdStatus pd_helstrom(const struct PdEnsemble *e, double *p_success);

/**
 * Pairwise trace-norm upper bound on the optimal success probability.
 *
 * # Safety
 * `e` must be a live handle; `bound` must be writable.
 */
enum PdStatus pd_pairwise_bound(const struct PdEnsemble *e, double *bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHDUALITY_H */
