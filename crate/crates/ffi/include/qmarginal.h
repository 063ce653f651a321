#ifndef QMARGINAL_H
#define QMARGINAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QmStatus {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_ARGUMENT = 2,
  QM_STATUS_CAP_EXCEEDED = 3,
  QM_STATUS_NOT_JOINABLE = 4,
  QM_STATUS_INCONSISTENT_MARGINALS = 5,
  QM_STATUS_PARSE_ERROR = 6,
  QM_STATUS_NUMERICAL_FAILURE = 7,
  QM_STATUS_BUFFER_TOO_SMALL = 8,
  QM_STATUS_PANIC = 9,
} QmStatus;

typedef enum QmVerdict {
  QM_VERDICT_FEASIBLE = 0,
  QM_VERDICT_INFEASIBLE = 1,
  QM_VERDICT_UNDECIDED = 2,
} QmVerdict;

// Opaque density matrix handle.
typedef struct QmDensityMatrix QmDensityMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qm_version(void);

// Message for the last failed call on this thread, or NULL. Valid until
// the next call into the library from the same thread.
const char *qm_last_error(void);

enum QmStatus qm_werner_triple_joinable(uintptr_t d,
                                        double psi_ab,
                                        double psi_ac,
                                        double psi_bc,
                                        bool *result);

enum QmStatus qm_iso_triple_joinable(uintptr_t d,
                                     double phi_ab,
                                     double phi_ac,
                                     double psi_bc,
                                     bool *result);

enum QmStatus qm_werner_pair_joinable(uintptr_t d, double psi_ab, double psi_ac, bool *result);

enum QmStatus qm_iso_pair_joinable(uintptr_t d, double phi_ab, double phi_ac, bool *result);

enum QmStatus qm_hybrid_pair_joinable(uintptr_t d, double phi_ab, double psi_bc, bool *result);

// One party sharing isotropic states with `n` others, parameters in `phis`.
enum QmStatus qm_iso_1n_joinable(uintptr_t d, const double *phis, uintptr_t n, bool *result);

// Agreement probabilities of three d-outcome variables.
enum QmStatus qm_classical_triple_joinable(uintptr_t d,
                                           double alpha_ab,
                                           double alpha_ac,
                                           double alpha_bc,
                                           bool *result);

enum QmStatus qm_sharable_1n_werner(uintptr_t d, uintptr_t n, double psi_minus, bool *result);

enum QmStatus qm_sharable_1n_iso(uintptr_t d, uintptr_t n, double phi_plus, bool *result);

// Exact m-n sharing threshold on -Psi as a reduced fraction.
enum QmStatus qm_sharing_threshold(uintptr_t d,
                                   uintptr_t m,
                                   uintptr_t n,
                                   int64_t *numerator,
                                   int64_t *denominator);

enum QmStatus qm_werner_state(uintptr_t d, double psi_minus, struct QmDensityMatrix **state);

enum QmStatus qm_isotropic_state(uintptr_t d, double phi_plus, struct QmDensityMatrix **state);

// Joining state of three Werner pairs; QM_STATUS_NOT_JOINABLE outside the region.
enum QmStatus qm_join_werner(uintptr_t d,
                             double psi_ab,
                             double psi_ac,
                             double psi_bc,
                             struct QmDensityMatrix **state);

// Joining state of isotropic A-B, A-C and Werner B-C pairs.
enum QmStatus qm_join_iso(uintptr_t d,
                          double phi_ab,
                          double phi_ac,
                          double psi_bc,
                          struct QmDensityMatrix **state);

// State on 1 + n parties whose pairs (0, j) are the most entangled 1-n
// sharable Werner state.
enum QmStatus qm_sharing_state_1n(uintptr_t d, uintptr_t n, struct QmDensityMatrix **state);

// Release a handle. NULL is ignored.
void qm_density_free(struct QmDensityMatrix *state);

// Total Hilbert space dimension.
enum QmStatus qm_density_dim(const struct QmDensityMatrix *state, uintptr_t *dim);

// Number of parties; with `dims` non-NULL also copies the party
// dimensions into it (capacity `len`).
enum QmStatus qm_density_parties(const struct QmDensityMatrix *state,
                                 uintptr_t *dims,
                                 uintptr_t len,
                                 uintptr_t *count);

// Copy the matrix entries row-major into `re` and `im`, each holding at
// least dim * dim doubles. `im` may be NULL.
enum QmStatus qm_density_entries(const struct QmDensityMatrix *state,
                                 double *re,
                                 double *im,
                                 uintptr_t len);

// Reduced state on the parties listed in `keep` (increasing order).
enum QmStatus qm_density_reduce(const struct QmDensityMatrix *state,
                                const uintptr_t *keep,
                                uintptr_t len,
                                struct QmDensityMatrix **reduced);

// Run the feasibility solver on a problem in the JSON problem format.
// `witness` may be NULL; otherwise it receives a handle for feasible
// problems and NULL for the others.
enum QmStatus qm_feasibility_json(const char *problem_json,
                                  double tol,
                                  uintptr_t max_iter,
                                  enum QmVerdict *verdict,
                                  double *residual,
                                  uintptr_t *iterations,
                                  struct QmDensityMatrix **witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMARGINAL_H */
