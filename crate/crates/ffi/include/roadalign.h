#ifndef ROADALIGN_H
#define ROADALIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The non-zero error classes match the command-line exit codes.
 */
typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_OUTPUT_ERROR = 1,
  RA_STATUS_CONFIG_ERROR = 2,
  RA_STATUS_TERRAIN_ERROR = 3,
  RA_STATUS_SEEDING_ERROR = 4,
  RA_STATUS_SOLVER_ERROR = 5,
  RA_STATUS_NULL_POINTER = 10,
  RA_STATUS_INVALID_ARGUMENT = 11,
  RA_STATUS_PANIC = 12,
} RaStatus;

/**
 * A configured alignment problem (terrain, endpoints, costs, constraints).
 */
typedef struct RaProblem RaProblem;

/**
 * Loaded terrain.
 */
typedef struct RaTerrain RaTerrain;

/**
 * Costs and feasibility of one design.
 */
typedef struct RaCostBreakdown {
  double v_cut;
  double v_fill;
  double length;
  double cost_earthwork;
  double cost_utility;
  /**
   * 1 when every constraint holds.
   */
  int32_t feasible;
  /**
   * Largest signed violation (≤ 0 when feasible).
   */
  double worst_violation;
} RaCostBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer is
 * valid until the next API call on the same thread.
 */
const char *ra_last_error_message(void);

/**
 * Loads an ASCII grid terrain file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RaStatus ra_terrain_load(const char *path, struct RaTerrain **out);

/**
 * Builds a terrain from `n_cols × n_rows` samples, row 0 at `origin_y`, row-major.
 *
 * # Safety
 * `values` must point to `n_cols * n_rows` doubles; `out` must be writable.
 */
enum RaStatus ra_terrain_from_raster(double origin_x,
                                     double origin_y,
                                     double spacing,
                                     size_t n_cols,
                                     size_t n_rows,
                                     const double *values,
                                     struct RaTerrain **out);

/**
 * Ground elevation at `(x, y)`.
 *
 * # Safety
 * `terrain` must come from a `ra_terrain_*` constructor; `out` must be writable.
 */
enum RaStatus ra_terrain_elevation(const struct RaTerrain *terrain,
                                   double x,
                                   double y,
                                   double *out);

/**
 * # Safety
 * `terrain` must be NULL or a handle not yet freed.
 */
void ra_terrain_free(struct RaTerrain *terrain);

/**
 * Reads a run config and its terrain.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out` must be writable.
 */
enum RaStatus ra_problem_from_config(const char *config_path, struct RaProblem **out);

/**
 * Length of the flat design vector `[X, Y, R, Z]`, or 0 for a NULL handle.
 *
 * # Safety
 * `problem` must be NULL or a live handle.
 */
size_t ra_problem_dimension(const struct RaProblem *problem);

/**
 * Writes the feasible seed design into `out`.
 *
 * # Safety
 * `problem` must be a live handle; `out` must hold `len` doubles.
 */
enum RaStatus ra_problem_seed(const struct RaProblem *problem, double *out, size_t len);

/**
 * Costs one flat design and checks its constraints.
 *
 * # Safety
 * `problem` must be a live handle; `x` must hold `len` doubles; `out` must be writable.
 */
enum RaStatus ra_problem_evaluate(const struct RaProblem *problem,
                                  const double *x,
                                  size_t len,
                                  struct RaCostBreakdown *out);

/**
 * # Safety
 * `problem` must be NULL or a handle not yet freed.
 */
void ra_problem_free(struct RaProblem *problem);

/**
 * Runs the experiment described by a config file and writes its outputs.
 * `out_dir` may be NULL to use the directory named in the config.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` NULL or NUL-terminated.
 */
enum RaStatus ra_run_experiment(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROADALIGN_H */
