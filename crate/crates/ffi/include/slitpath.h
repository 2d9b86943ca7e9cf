#ifndef SLITPATH_H
#define SLITPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Values accepted by the `mode` arguments.
typedef enum SlitpathMode {
  SLITPATH_MODE_CLASSICAL = 0,
  SLITPATH_MODE_FULL = 1,
} SlitpathMode;

typedef enum SlitpathStatus {
  SLITPATH_STATUS_OK = 0,
  SLITPATH_STATUS_NULL_POINTER = 1,
  SLITPATH_STATUS_INVALID_ARGUMENT = 2,
  SLITPATH_STATUS_VALIDATION = 3,
  SLITPATH_STATUS_PARSE = 4,
  SLITPATH_STATUS_DOMAIN = 5,
  SLITPATH_STATUS_NUMERICAL = 6,
  SLITPATH_STATUS_IO = 7,
  SLITPATH_STATUS_PANIC = 8,
} SlitpathStatus;

// Opaque validated configuration.
typedef struct SlitpathConfig SlitpathConfig;

// Physical inputs for [`slitpath_config_new`]. Numerical settings take
// their defaults. A non-positive `hbar` or `electron_mass` selects the
// CODATA value.
typedef struct SlitpathParams {
  double hbar;
  double electron_mass;
  double source_distance_m;
  double detector_distance_m;
  double longitudinal_velocity_mps;
  // Strictly increasing slit centres, `slit_count` values.
  const double *slit_centers_m;
  size_t slit_count;
  double slit_half_width_m;
  bool include_nonclassical;
} SlitpathParams;

// Summary of a deviation profile along one detector line.
typedef struct SlitpathReport {
  // Largest relative deviation over peaks.
  double max_relative_deviation;
  // Largest relative deviation over all floor-defined samples.
  double max_defined_relative_deviation;
  double velocity_floor_mps;
  size_t spike_count;
  size_t peak_count;
} SlitpathReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// successful call. Valid until the next `slitpath_*` call on the same thread.
const char *slitpath_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *slitpath_version(void);

// Built-in three-slit configuration.
//
// # Safety
// `out` must be valid for a pointer write.
enum SlitpathStatus slitpath_config_default(struct SlitpathConfig **out);

// Load and validate a `key = value` configuration file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for a pointer write.
enum SlitpathStatus slitpath_config_load(const char *path, struct SlitpathConfig **out);

// Build and validate a configuration from physical parameters.
//
// # Safety
// `params` must point to a readable [`SlitpathParams`] whose
// `slit_centers_m` holds `slit_count` values; `out` must be valid for a pointer write.
enum SlitpathStatus slitpath_config_new(const struct SlitpathParams *params,
                                        struct SlitpathConfig **out);

// Release a configuration. NULL is ignored.
//
// # Safety
// `config` must come from a `slitpath_config_*` constructor and not have been freed.
void slitpath_config_free(struct SlitpathConfig *config);

// Inter-slit hop time for two slit centres, s.
//
// # Safety
// `config` must be a live handle; `out` must be valid for a write.
enum SlitpathStatus slitpath_hop_time(const struct SlitpathConfig *config,
                                      double slit_i,
                                      double slit_j,
                                      double *out);

// Wavefunction at `(x, y)`, split into real and imaginary parts.
//
// # Safety
// `config` must be a live handle; `re` and `im` must be valid for writes.
enum SlitpathStatus slitpath_wavefunction(const struct SlitpathConfig *config,
                                          double x,
                                          double y,
                                          uint32_t mode,
                                          double *re,
                                          double *im);

// Bohmian `v_y` at `n` heights on the line at distance `x`. Undefined
// samples get `NaN` and `defined[i] = 0`.
//
// # Safety
// `ys` must hold `n` readable values; `v` and `defined` must hold `n` writable slots.
enum SlitpathStatus slitpath_velocity_profile(const struct SlitpathConfig *config,
                                              double x,
                                              const double *ys,
                                              size_t n,
                                              uint32_t mode,
                                              double *v,
                                              uint8_t *defined);

// Relative deviation `|v_full - v_classical| / |v_classical|` at `n`
// heights, with spike/peak summary. `rel_diff` may be NULL; otherwise it
// receives `n` values, `NaN` where not floor-defined.
//
// # Safety
// `ys` must hold `n` readable values; `rel_diff`, if not NULL, `n` writable
// slots; `report` must be valid for a write.
enum SlitpathStatus slitpath_deviation_report(const struct SlitpathConfig *config,
                                              double x,
                                              const double *ys,
                                              size_t n,
                                              double *rel_diff,
                                              struct SlitpathReport *report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SLITPATH_H */
