#ifndef JOINTSPEC_H
#define JOINTSPEC_H

/* This file is generated by cbindgen from jointspec-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible C-ABI call.
typedef enum JsStatus {
  JS_STATUS_OK = 0,
  JS_STATUS_NULL_POINTER = 1,
  JS_STATUS_INVALID_ARGUMENT = 2,
  JS_STATUS_INDEX_OUT_OF_RANGE = 3,
  JS_STATUS_UNKNOWN_MODEL = 4,
  JS_STATUS_NUMERICAL_ERROR = 5,
  JS_STATUS_SIMPLICITY_VIOLATION = 6,
  JS_STATUS_NOT_A_LATTICE = 7,
  JS_STATUS_INSUFFICIENT_DATA = 8,
  JS_STATUS_ROUNDING_FAILURE = 9,
  JS_STATUS_IO_ERROR = 10,
  JS_STATUS_PARSE_ERROR = 11,
  JS_STATUS_INTERNAL_ERROR = 12,
} JsStatus;

// Opaque recovered-polytope handle.
typedef struct JsPolytope JsPolytope;

// Opaque joint spectrum handle.
typedef struct JsSpectrum JsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Joint spectrum of the spin-oscillator model with spin size `n`, from
// the exact conserved-excitation blocks up to total excitation `t_max`.
enum JsStatus js_jc_spectrum(size_t n, size_t t_max, struct JsSpectrum **out);

// Joint spectrum of a toric catalog model ("s2" or "s2xs2") at level k,
// computed through the commuting operator family.
enum JsStatus js_toric_spectrum(const char *model, uint64_t k, struct JsSpectrum **out);

// Parse a spectrum CSV file (`hbar,lambda1[,lambda2],multiplicity`).
enum JsStatus js_spectrum_read_csv(const char *path, struct JsSpectrum **out);

// Write a spectrum as CSV, bit-identical to the CLI output format.
enum JsStatus js_spectrum_write_csv(const struct JsSpectrum *spectrum, const char *path);

// Number of distinct joint points.
size_t js_spectrum_len(const struct JsSpectrum *spectrum);

// Number of commuting operators (coordinates per point).
size_t js_spectrum_dim(const struct JsSpectrum *spectrum);

// Semiclassical parameter of the spectrum.
double js_spectrum_hbar(const struct JsSpectrum *spectrum);

// Copy out one joint point: `coords` must hold at least
// `js_spectrum_dim` doubles.
enum JsStatus js_spectrum_point(const struct JsSpectrum *spectrum,
                                size_t index,
                                double *coords,
                                size_t *multiplicity);

// Fit the affine lattice of a toric spectrum. `origin` and `spacing`
// must hold `js_spectrum_dim` doubles each.
enum JsStatus js_spectrum_lattice_fit(const struct JsSpectrum *spectrum,
                                      double *origin,
                                      double *spacing,
                                      double *residual);

// Exact symmetric Hausdorff distance between the two point clouds.
enum JsStatus js_spectrum_hausdorff(const struct JsSpectrum *a,
                                    const struct JsSpectrum *b,
                                    double *out);

// Release a spectrum handle.
void js_spectrum_free(struct JsSpectrum *spectrum);

// Recover the moment polytope from at least three spectra at distinct
// semiclassical parameters (lattice fit, hull extrapolation, rational
// rounding, Delzant test).
enum JsStatus js_recover(const struct JsSpectrum *const *spectra,
                         size_t count,
                         struct JsPolytope **out);

// Dimension of the recovered polytope (1 or 2).
size_t js_polytope_dim(const struct JsPolytope *polytope);

// Number of vertices (2 endpoints for an interval).
size_t js_polytope_vertex_count(const struct JsPolytope *polytope);

// Copy a vertex into `coords` (`js_polytope_dim` doubles).
enum JsStatus js_polytope_vertex(const struct JsPolytope *polytope, size_t index, double *coords);

// 1 when the recovered polytope passes the vertex smoothness test.
int32_t js_polytope_is_delzant(const struct JsPolytope *polytope);

// Worst rounding movement of the recovery's rational snapping stage.
double js_polytope_rounding_delta(const struct JsPolytope *polytope);

// Release a polytope handle.
void js_polytope_free(struct JsPolytope *polytope);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JOINTSPEC_H */
