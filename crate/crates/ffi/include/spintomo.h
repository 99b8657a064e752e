#ifndef SPINTOMO_H
#define SPINTOMO_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every C-ABI call.
typedef enum {
  // Success.
  ST_STATUS_OK = 0,
  // A required pointer argument was null.
  ST_STATUS_NULL_ARGUMENT = 1,
  // An argument was out of range or otherwise invalid.
  ST_STATUS_INVALID_ARGUMENT = 2,
  // Text input could not be parsed.
  ST_STATUS_PARSE_ERROR = 3,
  // A numerical routine failed.
  ST_STATUS_NUMERICAL_ERROR = 4,
  // A string argument was not valid UTF-8.
  ST_STATUS_UTF8_ERROR = 5,
  // The call panicked internally; the handle state is unchanged.
  ST_STATUS_INTERNAL_ERROR = 6,
} StStatus;

// Bell-state selector.
typedef enum {
  ST_BELL_PSI_PLUS = 0,
  ST_BELL_PSI_MINUS = 1,
  ST_BELL_PHI_PLUS = 2,
  ST_BELL_PHI_MINUS = 3,
} StBell;

// Opaque density-matrix handle.
typedef struct StDensityMatrix StDensityMatrix;

// Opaque spin-system handle.
typedef struct StSpinSystem StSpinSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Readable name of a status code (static storage, do not free).
const char *st_status_name(StStatus status);

// Create a spin system from the electron and nuclear Larmor frequencies and
// the signed hyperfine coupling, all in Hz.
StStatus st_spin_system_new(double nu_s, double nu_i, double hyperfine, StSpinSystem **out);

// Create the default nitrogen-in-fullerene spin system.
StStatus st_spin_system_default(StSpinSystem **out);

void st_spin_system_free(StSpinSystem *sys);

// The two first-order ESR line positions in Hz, written to `out[0..2]`.
StStatus st_esr_lines(const StSpinSystem *sys, double *out);

// The four ENDOR line positions in Hz ascending, written to `out[0..4]`.
StStatus st_endor_lines(const StSpinSystem *sys, double *out);

// Closed-form quantum critical temperature in K for an electron frequency
// in Hz.
StStatus st_critical_temperature(double nu_s, double *out);

// The pseudo-Boltzmann matrix, the starting point of every preparation.
StStatus st_pseudo_boltzmann(StDensityMatrix **out);

// Thermal state at `temperature` K; `exact` selects the exact exponential
// over the high-temperature linearization.
StStatus st_boltzmann(const StSpinSystem *sys,
                      double temperature,
                      int exact,
                      StDensityMatrix **out);

// Ideal pseudo-pure matrix; `target` is 10 or 11.
StStatus st_ideal_pseudo_pure(int target, StDensityMatrix **out);

// Ideal Bell matrix; `eight_level` zero gives the 4x4 two-qubit form.
StStatus st_ideal_bell(StBell which, int eight_level, StDensityMatrix **out);

// Run the pseudo-pure preparation sequence (`target` 10 or 11) with the
// given pulse angles in radians.
StStatus st_prepare_pseudo_pure(const StDensityMatrix *start,
                                int target,
                                double beta0,
                                double alpha0,
                                StDensityMatrix **out);

// Run the entanglement sequence. `mismatch`, when non-null, receives 1 if
// the start state does not look like the expected pseudo-pure state.
StStatus st_entangle(const StDensityMatrix *start,
                     StBell which,
                     double alpha1,
                     double beta1,
                     StDensityMatrix **out,
                     int *mismatch);

// The thermally prepared entanglement-protocol state at `temperature` K.
StStatus st_outlook_state(const StSpinSystem *sys, double temperature, StDensityMatrix **out);

// Parse a pulse program and run it from `initial` (the pseudo-Boltzmann
// matrix when `initial` is null), without decoherence.
StStatus st_run_program(const char *text, const StDensityMatrix *initial, StDensityMatrix **out);

void st_density_matrix_free(StDensityMatrix *m);

// Matrix dimension (4 or 8).
StStatus st_density_matrix_dim(const StDensityMatrix *m, uintptr_t *out);

// One matrix entry by 0-based row and column.
StStatus st_density_matrix_get(const StDensityMatrix *m,
                               uintptr_t row,
                               uintptr_t col,
                               double *re,
                               double *im);

StStatus st_density_matrix_trace(const StDensityMatrix *m, double *out);

// Extract the 4x4 two-qubit submatrix of an 8x8 state.
StStatus st_two_qubit_submatrix(const StDensityMatrix *m, StDensityMatrix **out);

// Serialize a matrix to its JSON text form. Free with `st_string_free`.
StStatus st_density_matrix_to_json(const StDensityMatrix *m, char **out);

// Parse a matrix from its JSON text form.
StStatus st_density_matrix_from_json(const char *text, StDensityMatrix **out);

void st_string_free(char *s);

// Mean-square-deviation fidelity of `exp` against `th`.
StStatus st_fidelity(const StDensityMatrix *exp, const StDensityMatrix *th, double *out);

// Partial-transpose test on the nuclear spin. `spectrum`, when non-null,
// receives the eight ascending eigenvalues.
StStatus st_ppt_analyze(const StDensityMatrix *rho,
                        double tolerance,
                        double *min_eigenvalue,
                        double *negativity,
                        int *entangled,
                        double *spectrum);

// Run the full tomography pipeline with the given imperfections and return
// the report as JSON text. Free with `st_string_free`.
StStatus st_run_tomography(StBell which,
                           double eps_beta,
                           double alpha1,
                           double t_psi,
                           double t_phi,
                           double tau,
                           double esr_pulse_width,
                           char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINTOMO_H */
