#ifndef SGFIF_H
#define SGFIF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SgfifStatus {
  SGFIF_STATUS_OK = 0,
  SGFIF_STATUS_NULL_POINTER = 1,
  SGFIF_STATUS_INVALID_ADDRESS = 2,
  SGFIF_STATUS_INVALID_SPEC = 3,
  SGFIF_STATUS_DEPTH_CAP = 4,
  SGFIF_STATUS_SOLVER_CAP = 5,
  SGFIF_STATUS_NON_UNIFORM = 6,
  SGFIF_STATUS_LAPLACIAN_NONEXISTENT = 7,
  SGFIF_STATUS_INVALID_ARGUMENT = 8,
  SGFIF_STATUS_NUMERICAL = 9,
  SGFIF_STATUS_PANIC = 10,
} SgfifStatus;

typedef enum SgfifEnergyClass {
  SGFIF_ENERGY_CLASS_HARMONIC = 0,
  SGFIF_ENERGY_CLASS_FINITE = 1,
  SGFIF_ENERGY_CLASS_INFINITE = 2,
} SgfifEnergyClass;

typedef enum SgfifLaplacianCase {
  SGFIF_LAPLACIAN_CASE_HARMONIC = 0,
  SGFIF_LAPLACIAN_CASE_CONSTANT = 1,
  SGFIF_LAPLACIAN_CASE_NONEXISTENT = 2,
} SgfifLaplacianCase;

// A fractal interpolation function specification.
typedef struct SgfifSpec SgfifSpec;

// Values of a function on `V_m`, in canonical vertex order.
typedef struct SgfifSurface SgfifSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL.
// The pointer stays valid until the next failing call on the same thread.
const char *sgfif_last_error(void);

// Build a spec from boundary values, midpoint values and vertical scalings.
//
// # Safety
// The three inputs must each point to three doubles; `out` must be writable.
enum SgfifStatus sgfif_spec_new(const double *boundary,
                                const double *midpoints,
                                const double *d,
                                struct SgfifSpec **out);

// Parse the JSON spec format (`{"boundary": [..], "midpoints": [..], "d": ..}`).
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum SgfifStatus sgfif_spec_from_json(const char *json, struct SgfifSpec **out);

// Serialize a spec to JSON; release the string with [`sgfif_string_free`].
//
// # Safety
// `spec` must be a live handle; `out` must be writable.
enum SgfifStatus sgfif_spec_to_json(const struct SgfifSpec *spec, char **out);

// # Safety
// `spec` must be NULL or a handle not yet freed.
void sgfif_spec_free(struct SgfifSpec *spec);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void sgfif_string_free(char *s);

// Evaluate the FIF at a vertex address such as `"12.3"`.
//
// # Safety
// `spec` must be a live handle, `address` NUL-terminated, `out` writable.
enum SgfifStatus sgfif_spec_eval(const struct SgfifSpec *spec, const char *address, double *out);

// Evaluate the harmonic function with boundary values `boundary` at `address`.
//
// # Safety
// `boundary` must point to three doubles, `address` be NUL-terminated, `out` writable.
enum SgfifStatus sgfif_harmonic_eval(const double *boundary, const char *address, double *out);

// Graph energies `E_0 ..= E_levels` (standard harmonic structure), written to
// `energies`, which must hold `levels + 1` doubles.
//
// # Safety
// `spec` must be a live handle and `energies` writable for `levels + 1` doubles.
enum SgfifStatus sgfif_energy_levels(const struct SgfifSpec *spec, size_t levels, double *energies);

// Closed-form total energy. `total` is `+INFINITY` when the class is infinite.
//
// # Safety
// `spec` must be a live handle; `class_out` and `total` writable.
enum SgfifStatus sgfif_energy_total(const struct SgfifSpec *spec,
                                    enum SgfifEnergyClass *class_out,
                                    double *total);

// Laplacian existence for a uniform-`d` FIF. `value` receives the constant
// (0 in the harmonic case, NaN when nonexistent).
//
// # Safety
// `spec` must be a live handle; `case_out` and `value` writable.
enum SgfifStatus sgfif_classify(const struct SgfifSpec *spec,
                                enum SgfifLaplacianCase *case_out,
                                double *value);

// `Δf` at an interior vertex.
//
// # Safety
// `spec` must be a live handle, `address` NUL-terminated, `out` writable.
enum SgfifStatus sgfif_laplacian_at(const struct SgfifSpec *spec, const char *address, double *out);

// The FIF solving `u(q_i) = a_i`, `Δu = eta`.
//
// # Safety
// `a` must point to three doubles; `out` must be writable.
enum SgfifStatus sgfif_solve_dirichlet(const double *a, double eta, struct SgfifSpec **out);

// Evaluate a spec on every vertex of `V_level`. Honours `FIF_DEPTH_CAP`.
//
// # Safety
// `spec` must be a live handle; `out` must be writable.
enum SgfifStatus sgfif_surface_new(const struct SgfifSpec *spec,
                                   size_t level,
                                   struct SgfifSurface **out);

// Solve the discrete Dirichlet problem `(3/2) 5^m Δ_m u = eta` on `V_level`
// with the sparse linear solver (level at most the solver cap, 7).
//
// # Safety
// `a` must point to three doubles; `out` must be writable.
enum SgfifStatus sgfif_oracle_dirichlet(const double *a,
                                        double eta,
                                        size_t level,
                                        struct SgfifSurface **out);

// Number of vertices; 0 for NULL.
//
// # Safety
// `s` must be NULL or a live handle.
size_t sgfif_surface_len(const struct SgfifSurface *s);

// Pointer to `sgfif_surface_len` values, valid while the surface lives; NULL for NULL.
//
// # Safety
// `s` must be NULL or a live handle.
const double *sgfif_surface_values(const struct SgfifSurface *s);

// Canonical address of vertex `index`, valid while the surface lives; NULL if out of range.
//
// # Safety
// `s` must be NULL or a live handle.
const char *sgfif_surface_address(const struct SgfifSurface *s, size_t index);

// Planar position of vertex `index` in the standard triangle, written to `xy[0..2]`.
//
// # Safety
// `s` must be a live handle and `xy` writable for two doubles.
enum SgfifStatus sgfif_surface_position(const struct SgfifSurface *s, size_t index, double *xy);

// # Safety
// `s` must be NULL or a handle not yet freed.
void sgfif_surface_free(struct SgfifSurface *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SGFIF_H */
