#ifndef CURVSENSE_H
#define CURVSENSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_DEGENERATE = 3,
  CS_STATUS_NUMERIC = 4,
  CS_STATUS_PANIC = 5,
} CsStatus;

/**
 * Opaque evolved probe together with its radius derivative.
 */
typedef struct CsModel CsModel;

/**
 * Opaque probe state.
 */
typedef struct CsState CsState;

/**
 * Opaque embedded surface.
 */
typedef struct CsSurface CsSurface;

/**
 * Physical units: reduced Planck constant and particle mass.
 */
typedef struct CsUnits {
  double hbar;
  double mass;
} CsUnits;

/**
 * Local geometry at a chart point. Matrices are row-major.
 */
typedef struct CsGeometryReport {
  double metric[4];
  double shape_operator[4];
  double mean_curvature;
  double gaussian_curvature;
  double surface_potential;
  double ricci;
} CsGeometryReport;

/**
 * Position Fisher information next to the QFI of the same model.
 */
typedef struct CsRatio {
  double fi;
  double qfi;
  double ratio;
  double skipped_mass;
} CsRatio;

/**
 * Field-perturbed QFI in both the printed and the re-derived normalisation.
 */
typedef struct CsFieldQfi {
  double printed;
  double derived;
  double gauge;
} CsFieldQfi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Natural units, ħ = M = 1.
 */
struct CsUnits cs_units_natural(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call on the same thread.
 */
const char *cs_last_error_message(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_surface_sphere(double radius, struct CsSurface **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_surface_cylinder(double radius, struct CsSurface **out);

/**
 * Torus with tube radius `tube` around a circle of radius `center`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_surface_torus(double tube, double center, struct CsSurface **out);

/**
 * # Safety
 * `s` must be NULL or a handle from a `cs_surface_*` constructor not yet freed.
 */
void cs_surface_free(struct CsSurface *s);

/**
 * # Safety
 * `s` must be a live surface handle and `out` valid for writes.
 */
enum CsStatus cs_geometry_report(const struct CsSurface *s,
                                 double u,
                                 double v,
                                 struct CsUnits units,
                                 struct CsGeometryReport *out);

/**
 * Difference `ξħ²R/M − V_s` between the two quantization prescriptions.
 *
 * # Safety
 * `s` must be a live surface handle and `out` valid for writes.
 */
enum CsStatus cs_quantization_gap(const struct CsSurface *s,
                                  double u,
                                  double v,
                                  double xi,
                                  struct CsUnits units,
                                  double *out);

/**
 * Normalised superposition of sphere modes `Σ (re + i·im) |j, m⟩`.
 *
 * # Safety
 * The four arrays must each hold `len` elements; `out` must be valid for writes.
 */
enum CsStatus cs_state_sphere(const uint32_t *j,
                              const int32_t *m,
                              const double *re,
                              const double *im,
                              size_t len,
                              struct CsState **out);

/**
 * Normalised superposition of cylinder modes `Σ (re + i·im) |k, m⟩`.
 *
 * # Safety
 * The four arrays must each hold `len` elements; `out` must be valid for writes.
 */
enum CsStatus cs_state_cylinder(const double *k,
                                const int32_t *m,
                                const double *re,
                                const double *im,
                                size_t len,
                                struct CsState **out);

/**
 * `cos α |0,0⟩ + sin α e^{iβ} |j,m⟩` on the sphere.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_state_two_level(uint32_t j,
                                 int32_t m,
                                 double alpha,
                                 double beta,
                                 struct CsState **out);

/**
 * Von Mises packet with concentration `kappa`, truncated at the smallest
 * `j ≤ j_cap` leaving tail mass below 1e-12.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_state_von_mises(double kappa, size_t j_cap, struct CsState **out);

/**
 * # Safety
 * `s` must be NULL or a handle from a `cs_state_*` constructor not yet freed.
 */
void cs_state_free(struct CsState *s);

/**
 * Evolves `state` freely for time `t` on a surface of radius `lambda`.
 *
 * # Safety
 * `state` must be a live state handle and `out` valid for writes.
 */
enum CsStatus cs_model_new(const struct CsState *state,
                           double t,
                           double lambda,
                           struct CsUnits units,
                           struct CsModel **out);

/**
 * # Safety
 * `m` must be NULL or a handle from [`cs_model_new`] not yet freed.
 */
void cs_model_free(struct CsModel *m);

/**
 * Quantum Fisher information for the radius.
 *
 * # Safety
 * `model` must be a live model handle and `out` valid for writes.
 */
enum CsStatus cs_qfi_pure(const struct CsModel *model, double *out);

/**
 * Fisher information of an ideal position measurement, on the default grid.
 *
 * # Safety
 * `model` must be a live model handle and `out` valid for writes.
 */
enum CsStatus cs_position_fi(const struct CsModel *model, double *out);

/**
 * Position FI, QFI and their ratio.
 *
 * # Safety
 * `model` must be a live model handle and `out` valid for writes.
 */
enum CsStatus cs_fi_qfi_ratio(const struct CsModel *model, struct CsRatio *out);

/**
 * QFI of the perturbed sphere ground state in a uniform field.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_sphere_ground_qfi(double charge,
                                   double field,
                                   double lambda,
                                   struct CsUnits units,
                                   struct CsFieldQfi *out);

/**
 * QFI of the perturbed cylinder state `(k, m)` in a radial field.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CsStatus cs_cylinder_field_qfi(double k,
                                    int32_t m,
                                    double charge,
                                    double field,
                                    double lambda,
                                    struct CsUnits units,
                                    struct CsFieldQfi *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVSENSE_H */
