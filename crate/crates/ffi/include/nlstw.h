#ifndef NLSTW_H
#define NLSTW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlstwStatus {
  NLSTW_STATUS_OK = 0,
  NLSTW_STATUS_NULL_POINTER = 1,
  NLSTW_STATUS_INVALID_ARGUMENT = 2,
  NLSTW_STATUS_NOT_CONVERGED = 3,
  NLSTW_STATUS_IO = 4,
  NLSTW_STATUS_FORMAT = 5,
  NLSTW_STATUS_INTERNAL = 6,
} NlstwStatus;

/**
 * Complex field on a grid.
 */
typedef struct NlstwField NlstwField;

/**
 * Periodic grid.
 */
typedef struct NlstwGrid NlstwGrid;

/**
 * Nonlinearity `F`.
 */
typedef struct NlstwNonlinearity NlstwNonlinearity;

/**
 * Result of a constrained solve.
 */
typedef struct NlstwWave NlstwWave;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The string is
 * owned by the library and valid until the next failing call.
 */
const char *nlstw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nlstw_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NlstwStatus nlstw_grid_new(double l1,
                                double l2,
                                uintptr_t n1,
                                uintptr_t n2,
                                struct NlstwGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from `nlstw_grid_new` not yet freed.
 */
void nlstw_grid_free(struct NlstwGrid *grid);

/**
 * Number of grid points, `n1 * n2`; zero for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
uintptr_t nlstw_grid_len(const struct NlstwGrid *grid);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NlstwStatus nlstw_nonlinearity_gp(struct NlstwNonlinearity **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NlstwStatus nlstw_nonlinearity_cubic_quintic(double alpha5, struct NlstwNonlinearity **out);

/**
 * # Safety
 * `nl` must be null or a live handle.
 */
void nlstw_nonlinearity_free(struct NlstwNonlinearity *nl);

/**
 * Field from split real and imaginary arrays of length `n1 * n2`.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `grid` must be live.
 */
enum NlstwStatus nlstw_field_from_values(const struct NlstwGrid *grid,
                                         const double *re,
                                         const double *im,
                                         uintptr_t len,
                                         struct NlstwField **out);

/**
 * Copies `len = n1 * n2` values into `re` and `im`.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum NlstwStatus nlstw_field_values(const struct NlstwField *field,
                                    double *re,
                                    double *im,
                                    uintptr_t len);

/**
 * Number of values of a field; zero for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uintptr_t nlstw_field_len(const struct NlstwField *field);

/**
 * Reads a complex NLSTW1 file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` writable.
 */
enum NlstwStatus nlstw_field_read(const char *path, struct NlstwField **out);

/**
 * Writes a complex NLSTW1 file atomically.
 *
 * # Safety
 * `field` must be live and `path` a NUL-terminated string.
 */
enum NlstwStatus nlstw_field_write(const struct NlstwField *field, const char *path);

/**
 * # Safety
 * `field` must be null or a live handle.
 */
void nlstw_field_free(struct NlstwField *field);

/**
 * # Safety
 * Handles must be live; `out` writable.
 */
enum NlstwStatus nlstw_energy(const struct NlstwField *field,
                              const struct NlstwNonlinearity *nl,
                              double *out);

/**
 * # Safety
 * `field` must be live; `out` writable.
 */
enum NlstwStatus nlstw_momentum(const struct NlstwField *field, double *out);

/**
 * Least-squares speed of a field.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum NlstwStatus nlstw_extract_speed(const struct NlstwField *field,
                                     const struct NlstwNonlinearity *nl,
                                     double *out);

/**
 * Relative residuals of the two planar Pohozaev identities at speed `c`.
 *
 * # Safety
 * Handles must be live; `scaling` and `planar` writable.
 */
enum NlstwStatus nlstw_pohozaev(const struct NlstwField *field,
                                const struct NlstwNonlinearity *nl,
                                double c,
                                double *scaling,
                                double *planar);

/**
 * Minimizes `E` at momentum `q`. `tol <= 0` and `max_iter == 0` select the
 * defaults. On `NLSTW_STATUS_NOT_CONVERGED` the best iterate is still
 * returned in `out` and must be freed.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum NlstwStatus nlstw_solve_momentum(const struct NlstwGrid *grid,
                                      const struct NlstwNonlinearity *nl,
                                      double q,
                                      double tol,
                                      uintptr_t max_iter,
                                      struct NlstwWave **out);

/**
 * Minimizes `I` at kinetic energy `k`; the returned wave is rescaled to speed `c`.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum NlstwStatus nlstw_solve_kinetic(const struct NlstwGrid *grid,
                                     const struct NlstwNonlinearity *nl,
                                     double k,
                                     double tol,
                                     uintptr_t max_iter,
                                     struct NlstwWave **out);

/**
 * # Safety
 * `wave` must be live; `out` writable.
 */
enum NlstwStatus nlstw_wave_speed(const struct NlstwWave *wave, double *out);

/**
 * # Safety
 * `wave` must be live; `out` writable.
 */
enum NlstwStatus nlstw_wave_energy(const struct NlstwWave *wave, double *out);

/**
 * Whether the solve met its tolerance; false for a null handle.
 *
 * # Safety
 * `wave` must be null or a live handle.
 */
bool nlstw_wave_converged(const struct NlstwWave *wave);

/**
 * Copies the wave's field into a new field handle.
 *
 * # Safety
 * `wave` must be live; `out` writable.
 */
enum NlstwStatus nlstw_wave_field(const struct NlstwWave *wave, struct NlstwField **out);

/**
 * JSON sidecar of the wave as a newly allocated string; free it with
 * `nlstw_string_free`.
 *
 * # Safety
 * `wave` must be live; `out` writable.
 */
enum NlstwStatus nlstw_wave_sidecar_json(const struct NlstwWave *wave, char **out);

/**
 * # Safety
 * `wave` must be null or a live handle.
 */
void nlstw_wave_free(struct NlstwWave *wave);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void nlstw_string_free(char *s);

/**
 * Action and largest relative identity residual of the KP-I lump on the
 * `(l, sqrt2 l)` grid with `n x n` points.
 *
 * # Safety
 * `action` and `residual` must be writable.
 */
enum NlstwStatus nlstw_kp_lump(double gamma,
                               double l,
                               uintptr_t n,
                               double *action,
                               double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLSTW_H */
