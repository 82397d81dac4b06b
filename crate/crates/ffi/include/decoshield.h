#ifndef DECOSHIELD_H
#define DECOSHIELD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DS_REGIME_INTERIOR = 0,
  DS_REGIME_PROJECTIVE_LIMIT = 1,
  DS_REGIME_NO_ENTANGLEMENT = 2,
} DsRegime;

typedef enum {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_ARGUMENT = 2,
  DS_STATUS_DIMENSION_MISMATCH = 3,
  DS_STATUS_NOT_PHYSICAL = 4,
  DS_STATUS_POST_SELECTION_FAILED = 5,
  DS_STATUS_DEGENERATE = 6,
  DS_STATUS_PANIC = 7,
} DsStatus;

/**
 * Opaque two-qubit optimum report.
 */
typedef struct DsConcurrenceReport DsConcurrenceReport;

/**
 * Opaque density matrix of dimension 2 or 4.
 */
typedef struct DsDensityMatrix DsDensityMatrix;

/**
 * Optimal single-qubit strengths and the maximal fidelity.
 */
typedef struct {
  double m;
  double n;
  double f_max;
  bool projective;
} DsQubitOptimum;

/**
 * Fidelities of the six axis states and their average.
 */
typedef struct {
  double f0;
  double f1;
  double fe;
  double favg;
} DsSixState;

/**
 * Plain copy of a two-qubit optimum report.
 */
typedef struct {
  double lambda1;
  double lambda2;
  double lambda2_max;
  double m;
  double n1;
  double n2;
  double h;
  double alpha_sq_opt;
  double success_prob;
  DsRegime regime;
} DsReportValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *ds_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *ds_version(void);

/**
 * Density matrix `|ψ⟩⟨ψ|` from `len` (2 or 4) amplitudes; `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `len` readable doubles; `out`
 * must be writable.
 */
DsStatus ds_density_from_pure(const double *re,
                              const double *im,
                              size_t len,
                              DsDensityMatrix **out);

/**
 * Density matrix from `dim*dim` row-major entries; validated for
 * Hermiticity, unit trace and positivity. `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim*dim` readable doubles;
 * `out` must be writable.
 */
DsStatus ds_density_from_entries(size_t dim,
                                 const double *re,
                                 const double *im,
                                 DsDensityMatrix **out);

/**
 * Dimension of the matrix (2 or 4), or 0 for a null handle.
 *
 * # Safety
 * `rho` must be null or a live handle.
 */
size_t ds_density_dim(const DsDensityMatrix *rho);

/**
 * Copies the row-major entries into `re` and `im` (each `len >= dim*dim`).
 *
 * # Safety
 * `rho` must be a live handle; `re` and `im` must be writable for `len` doubles.
 */
DsStatus ds_density_entries(const DsDensityMatrix *rho, double *re, double *im, size_t len);

/**
 * Releases a density-matrix handle; null is ignored.
 *
 * # Safety
 * `rho` must be null or a handle not yet freed.
 */
void ds_density_free(DsDensityMatrix *rho);

/**
 * Applies the GAD channel `(p, r)` to a single-qubit state via its Kraus operators.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
DsStatus ds_gad_apply(double p, double r, const DsDensityMatrix *rho, DsDensityMatrix **out);

/**
 * Applies the GAD channel `(p, r)` through its environment dilation.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
DsStatus ds_gad_apply_dilation(double p,
                               double r,
                               const DsDensityMatrix *rho,
                               DsDensityMatrix **out);

/**
 * Wootters concurrence of a two-qubit state.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
DsStatus ds_wootters_concurrence(const DsDensityMatrix *rho, double *out);

/**
 * Optimal single-qubit strengths for equatorial states.
 *
 * # Safety
 * `out` must be writable.
 */
DsStatus ds_qubit_optimal(double p, double r, DsQubitOptimum *out);

/**
 * Fidelity and success probability of the equatorial state at phase `phi`.
 *
 * # Safety
 * `fidelity` and `success_prob` must be writable.
 */
DsStatus ds_qubit_protect(double p,
                          double r,
                          double m,
                          double n,
                          double phi,
                          double *fidelity,
                          double *success_prob);

/**
 * BB84 error rate over the four equatorial signal states.
 *
 * # Safety
 * `out` must be writable.
 */
DsStatus ds_bb84_error_rate(double p, double r, double m, double n, double *out);

/**
 * Six-state fidelities and their average.
 *
 * # Safety
 * `out` must be writable.
 */
DsStatus ds_six_state(double p, double r, double m, double n, DsSixState *out);

/**
 * Optimal two-qubit protection for input `√a|00⟩ + √(1−a)|11⟩`, `a = alpha_sq`.
 *
 * # Safety
 * `out` must be writable.
 */
DsStatus ds_entangle_optimal(double p1,
                             double r1,
                             double p2,
                             double r2,
                             double alpha_sq,
                             DsConcurrenceReport **out);

/**
 * Copies every field of the report into `out`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
DsStatus ds_report_values(const DsConcurrenceReport *report, DsReportValues *out);

/**
 * Releases a report handle; null is ignored.
 *
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void ds_report_free(DsConcurrenceReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECOSHIELD_H */
