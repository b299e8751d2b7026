#ifndef GASKET_SOLENOID_H
#define GASKET_SOLENOID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible `gs_` function.
 */
typedef enum {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  /**
   * Unparseable text, bad ranges, or a point that is not sampled.
   */
  GS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Groupoid or domain mismatch.
   */
  GS_STATUS_DOMAIN_ERROR = 3,
  /**
   * The zeta series diverges at the requested `s`.
   */
  GS_STATUS_DIVERGENT = 4,
  /**
   * A certificate or verification check failed.
   */
  GS_STATUS_VERIFICATION_FAILED = 5,
  /**
   * Operator-level failure (not geometric, window too small).
   */
  GS_STATUS_OPERATOR_ERROR = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  GS_STATUS_PANIC = 7,
} GsStatus;

/**
 * A function sampled on the vertices of `K_level` at spacing `2^-resolution`.
 */
typedef struct GsFunction GsFunction;

/**
 * The vertex graph of `K_level` at spacing `2^-resolution`.
 */
typedef struct GsGraph GsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gs_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or 0
 * when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t gs_last_error_message(char *buf, size_t len);

/**
 * Number of oriented edges of `K_level` with lengths `2^min_exp ..= 2^max_exp`.
 *
 * # Safety
 * `count` must be valid for writes.
 */
GsStatus gs_edge_count(uint32_t level, int32_t min_exp, int32_t max_exp, uint64_t *count);

/**
 * Truncated `zeta_D(s)` with `cutoff` terms per series, and a bound on the
 * omitted tail.
 *
 * # Safety
 * `value` and `tail_bound` must be valid for writes; `tail_bound` may be null.
 */
GsStatus gs_zeta(double s, uint32_t cutoff, double *value, double *tail_bound);

/**
 * Residue of `zeta_D` at the metric dimension, extrapolated from `eps[0..n]`.
 *
 * # Safety
 * `eps` must be valid for `n` reads and `residue` for writes.
 */
GsStatus gs_residue(const double *eps, size_t n, double *residue);

/**
 * Builds a function from a family name: `alpha`, `beta`, `alpha2`, a
 * constant, or `affine:c0,ca,cb`.
 *
 * # Safety
 * `family` must be a NUL-terminated string and `handle` valid for writes.
 */
GsStatus gs_function_new(const char *family,
                         uint32_t level,
                         int32_t resolution,
                         GsFunction **handle);

/**
 * Builds a function from `n` values in vertex order of the sample graph.
 *
 * # Safety
 * `values` must be valid for `n` reads and `handle` for writes.
 */
GsStatus gs_function_from_values(uint32_t level,
                                 int32_t resolution,
                                 const double *values,
                                 size_t n,
                                 GsFunction **handle);

/**
 * # Safety
 * `f` must be null or a handle from `gs_function_new`, not yet freed.
 */
void gs_function_free(GsFunction *f);

/**
 * Value at a point `"alpha,beta"` of `K_ambient_level`.
 *
 * # Safety
 * `f` must be a live handle, `point` NUL-terminated, `value` valid for writes.
 */
GsStatus gs_function_evaluate(const GsFunction *f,
                              const char *pt,
                              uint32_t ambient_level,
                              double *value);

/**
 * Integral against the normalized Hausdorff measure of `K_level`, with an
 * error bound.
 *
 * # Safety
 * `f` must be a live handle; `value` valid for writes; `error_bound` may be null.
 */
GsStatus gs_function_integrate(const GsFunction *f,
                               uint32_t level,
                               double *value,
                               double *error_bound);

/**
 * Noncommutative integral of `f` by the residue route.
 *
 * # Safety
 * `f` must be a live handle, `eps` valid for `n` reads, `value` for writes.
 */
GsStatus gs_function_nc_integral(const GsFunction *f,
                                 uint32_t level,
                                 const double *eps,
                                 size_t n,
                                 double *value);

/**
 * # Safety
 * `handle` must be valid for writes.
 */
GsStatus gs_graph_new(uint32_t level, int32_t resolution, GsGraph **handle);

/**
 * # Safety
 * `g` must be null or a handle from `gs_graph_new`, not yet freed.
 */
void gs_graph_free(GsGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t gs_graph_vertex_count(const GsGraph *g);

/**
 * Index of the vertex at `"alpha,beta"`.
 *
 * # Safety
 * `g` must be a live handle, `pt` NUL-terminated, `index` valid for writes.
 */
GsStatus gs_graph_vertex_index(const GsGraph *g, const char *pt, size_t *index);

/**
 * Geodesic distance between two vertex indices.
 *
 * # Safety
 * `g` must be a live handle and `distance` valid for writes.
 */
GsStatus gs_graph_distance(const GsGraph *g, size_t from, size_t to, double *distance);

/**
 * Connes distance between two points, with the dual witness verified.
 * Returns `VerificationFailed` when the certificate does not check.
 *
 * # Safety
 * `from` and `to` must be NUL-terminated and `distance` valid for writes.
 */
GsStatus gs_connes_distance(const char *from,
                            const char *to,
                            uint32_t level,
                            int32_t resolution,
                            double *distance);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GASKET_SOLENOID_H */
