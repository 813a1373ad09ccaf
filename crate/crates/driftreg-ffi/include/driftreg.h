#ifndef DRIFTREG_H
#define DRIFTREG_H

/* This header is generated by cbindgen from driftreg-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes returned by every fallible call.
typedef enum driftreg_status {
  DRIFTREG_STATUS_OK = 0,
  DRIFTREG_STATUS_NULL_POINTER = 1,
  DRIFTREG_STATUS_INVALID_ARGUMENT = 2,
  DRIFTREG_STATUS_DIMENSION_MISMATCH = 3,
  DRIFTREG_STATUS_NUMERICAL_FAILURE = 4,
  DRIFTREG_STATUS_INVALID_UTF8 = 5,
  DRIFTREG_STATUS_PANIC = 6,
} driftreg_status;

// Opaque learner handle.
typedef struct driftreg_learner driftreg_learner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *driftreg_version(void);

// Copies the most recent error message of this thread into `buf`
// (truncated, always NUL-terminated when `cap > 0`) and returns the full
// message length in bytes, excluding the terminator.
//
// # Safety
// `buf` must be writable for `cap` bytes, or null with `cap == 0`.
uintptr_t driftreg_last_error(char *buf, uintptr_t cap);

// Builds a learner of input dimension `dim` from the JSON spec used by the
// CLI and config files, e.g. `{"algo":"laser","b":0.5,"c":100.0}`.
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be a valid
// pointer to a handle slot.
enum driftreg_status driftreg_learner_new_json(uintptr_t dim,
                                               const char *spec_json,
                                               struct driftreg_learner **out);

// Normalized least mean squares.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_nlms(uintptr_t dim,
                                               double mu,
                                               double eps,
                                               struct driftreg_learner **out);

// Recursive least squares with forgetting factor `r` in (0, 1].
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_rls(uintptr_t dim,
                                              double r,
                                              struct driftreg_learner **out);

// RLS with covariance reset every `reset_period` samples; 0 never resets
// (plain RLS).
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_crrls(uintptr_t dim,
                                                double r,
                                                uint64_t reset_period,
                                                struct driftreg_learner **out);

// Adaptive regularization of weights for regression.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_arowr(uintptr_t dim,
                                                double r,
                                                struct driftreg_learner **out);

// Aggregating algorithm for regression.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_aar(uintptr_t dim,
                                              double b,
                                              struct driftreg_learner **out);

// ARCOR with the polynomial eigenvalue-floor schedule of exponent `q` and
// projection radius `radius` (pass INFINITY to disable the projection).
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_arcor(uintptr_t dim,
                                                double r,
                                                double radius,
                                                double q,
                                                struct driftreg_learner **out);

// LASER with drift coupling `c` (pass INFINITY for the exact AAR
// reduction) and optional prediction clip bound `y_bound` (pass 0 or a
// negative value for unclipped predictions).
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum driftreg_status driftreg_learner_new_laser(uintptr_t dim,
                                                double b,
                                                double c,
                                                double y_bound,
                                                struct driftreg_learner **out);

// Frees a learner handle. Passing null is a no-op.
//
// # Safety
// `learner` must be a live handle from a constructor, freed only once.
void driftreg_learner_free(struct driftreg_learner *learner);

// Input dimension of the learner; 0 for a null handle.
//
// # Safety
// `learner` must be a live handle or null.
uintptr_t driftreg_learner_dim(const struct driftreg_learner *learner);

// Number of samples absorbed so far; 0 for a null handle.
//
// # Safety
// `learner` must be a live handle or null.
uint64_t driftreg_learner_steps(const struct driftreg_learner *learner);

// Number of covariance resets performed so far (CR-RLS and ARCOR; 0 for
// the other learners or a null handle).
//
// # Safety
// `learner` must be a live handle or null.
uintptr_t driftreg_learner_reset_count(const struct driftreg_learner *learner);

// Prediction for the input `x` without updating any state.
//
// # Safety
// `learner` must be a live handle; `x` must hold `len` doubles; `yhat`
// must be writable.
enum driftreg_status driftreg_learner_predict(const struct driftreg_learner *learner,
                                              const double *x,
                                              uintptr_t len,
                                              double *yhat);

// Absorbs one labeled sample without reporting the prediction.
//
// # Safety
// As [`driftreg_learner_predict`], with a mutable handle.
enum driftreg_status driftreg_learner_update(struct driftreg_learner *learner,
                                             const double *x,
                                             uintptr_t len,
                                             double y);

// One online round: writes the prediction made before the label was seen
// to `yhat`, then absorbs the sample.
//
// # Safety
// As [`driftreg_learner_update`]; `yhat` must be writable.
enum driftreg_status driftreg_learner_step(struct driftreg_learner *learner,
                                           const double *x,
                                           uintptr_t len,
                                           double y,
                                           double *yhat);

// Copies the current weight vector into `out`; `len` must equal the
// learner dimension.
//
// # Safety
// `learner` must be a live handle; `out` must be writable for `len`
// doubles.
enum driftreg_status driftreg_learner_weights(const struct driftreg_learner *learner,
                                              double *out,
                                              uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIFTREG_H */
