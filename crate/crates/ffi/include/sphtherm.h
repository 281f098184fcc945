#ifndef SPHTHERM_H
#define SPHTHERM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum SphStatus {
  SPH_OK = 0,
  SPH_NULL_POINTER = 1,
  SPH_INVALID_ARGUMENT = 2,
  SPH_GEOMETRY_ERROR = 3,
  SPH_CAVITY_ERROR = 4,
  SPH_PARTICLE_ERROR = 5,
  SPH_SOLVER_ERROR = 6,
  SPH_REPORT_ERROR = 7,
  SPH_IO_ERROR = 8,
  SPH_CONFIG_ERROR = 9,
  /**
   * The run stopped at `max_steps`; the simulation handle is still returned.
   */
  SPH_NOT_CONVERGED = 10,
  SPH_BUFFER_TOO_SMALL = 11,
  SPH_PANIC = 12,
} SphStatus;

/**
 * Profile document, validated.
 */
typedef struct SphProfile SphProfile;

/**
 * Solved simulation: particle field and report.
 */
typedef struct SphSimulation SphSimulation;

/**
 * Run parameters. Obtain defaults from [`sph_run_options_default`].
 */
typedef struct SphRunOptions {
  /**
   * Particle spacing, m.
   */
  double dp;
  /**
   * Smoothing length over spacing.
   */
  double h_over_dp;
  /**
   * Steady-state tolerance on max |dT/dt|, K/s.
   */
  double tolerance;
  uint64_t max_steps;
  /**
   * Worker threads; 0 uses the global pool.
   */
  uint32_t threads;
} SphRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *sph_last_error_message(void);

/**
 * Frees a string returned by this library (not the last-error message).
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void sph_string_free(char *s);

struct SphRunOptions sph_run_options_default(void);

/**
 * Loads and validates a TOML profile from a file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SphStatus sph_profile_load_file(const char *path, struct SphProfile **out);

/**
 * Parses and validates a TOML profile held in memory.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SphStatus sph_profile_load_str(const char *text, struct SphProfile **out);

/**
 * # Safety
 * `profile` must be null or a handle from `sph_profile_load_*` not yet freed.
 */
void sph_profile_free(struct SphProfile *profile);

/**
 * Solves `profile` to steady state. `options` may be null for defaults.
 * Returns `SphNotConverged` with a valid `*out` when the step limit is hit.
 *
 * # Safety
 * `profile` must be a live handle, `options` null or valid, `out` a valid pointer.
 */
enum SphStatus sph_simulate(const struct SphProfile *profile,
                            const struct SphRunOptions *options,
                            struct SphSimulation **out);

/**
 * # Safety
 * `sim` must be null or a handle from `sph_simulate` not yet freed.
 */
void sph_simulation_free(struct SphSimulation *sim);

/**
 * Number of particles; 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t sph_simulation_particle_count(const struct SphSimulation *sim);

/**
 * # Safety
 * `sim` must be null or a live handle.
 */
bool sph_simulation_converged(const struct SphSimulation *sim);

/**
 * Copies particle temperatures (°C) into `buf`, which holds `len` values.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum SphStatus sph_simulation_copy_temperatures(const struct SphSimulation *sim,
                                                double *buf,
                                                size_t len);

/**
 * Copies particle positions as interleaved `x, y` pairs; `len` counts doubles.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum SphStatus sph_simulation_copy_positions(const struct SphSimulation *sim,
                                             double *buf,
                                             size_t len);

/**
 * Heat flow rates through the internal and external faces, W/m, both
 * positive for heat flowing from inside to outside. Either output may be null.
 *
 * # Safety
 * `sim` must be a live handle; outputs null or valid.
 */
enum SphStatus sph_simulation_heat_flow(const struct SphSimulation *sim,
                                        double *q_internal,
                                        double *q_external);

/**
 * Thermal conductance L2D, W/(m·K).
 *
 * # Safety
 * `sim` must be a live handle and `l2d` a valid pointer.
 */
enum SphStatus sph_simulation_l2d(const struct SphSimulation *sim, double *l2d);

/**
 * Full report as JSON; free with [`sph_string_free`]. Null on failure.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
char *sph_simulation_report_json(const struct SphSimulation *sim);

/**
 * Equivalent conductivity of a rectangular air cavity with default constants.
 * `width` is across the heat flow, `depth` along it, `gap` the opening (0 if closed).
 * A fully ventilated cavity sets `*exposed` and leaves `*k_eq` untouched.
 *
 * # Safety
 * `k_eq` and `exposed` must be valid pointers.
 */
enum SphStatus sph_cavity_conductivity(double width,
                                       double depth,
                                       double gap,
                                       double *k_eq,
                                       bool *exposed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHTHERM_H */
