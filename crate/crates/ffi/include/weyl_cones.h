#ifndef WEYL_CONES_H
#define WEYL_CONES_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_ARGUMENT = 2,
  WC_STATUS_OUT_OF_RANGE = 3,
  WC_STATUS_GENERAL_POSITION = 4,
  WC_STATUS_BUDGET = 5,
  WC_STATUS_UNSUPPORTED = 6,
  WC_STATUS_EXHAUSTED = 7,
  WC_STATUS_BUFFER_TOO_SMALL = 8,
  WC_STATUS_PANIC = 9,
  WC_STATUS_INTERNAL = 10,
} WcStatus;

typedef enum WcFamily {
  WC_FAMILY_A = 0,
  WC_FAMILY_B = 1,
  WC_FAMILY_GENERIC = 2,
} WcFamily;

typedef enum WcDistribution {
  WC_DISTRIBUTION_GAUSSIAN = 0,
  WC_DISTRIBUTION_SPHERE = 1,
  WC_DISTRIBUTION_SYMMETRIC_EXPONENTIAL = 2,
} WcDistribution;

// A point configuration with its family tag.
typedef struct WcConfig WcConfig;

// A finished Monte Carlo experiment.
typedef struct WcReport WcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *wc_status_message(enum WcStatus status);

// Library version as a static NUL-terminated string.
const char *wc_version(void);

// Message of the last failed call on this thread (empty after a success).
// Reading it never changes it.
//
// # Safety
// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
enum WcStatus wc_last_error(char *buf, size_t cap, size_t *needed);

// Number of cones of the tessellation as a decimal string.
//
// # Safety
// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
enum WcStatus wc_region_count(enum WcFamily fam,
                              size_t n,
                              size_t d,
                              char *buf,
                              size_t cap,
                              size_t *needed);

// Number of `k`-faces of the tessellation as a decimal string.
//
// # Safety
// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
enum WcStatus wc_total_face_count(enum WcFamily fam,
                                  size_t n,
                                  size_t d,
                                  size_t k,
                                  char *buf,
                                  size_t cap,
                                  size_t *needed);

// Parses `{"family", "d", "points"}` JSON into a new configuration.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum WcStatus wc_config_from_json(const char *json, struct WcConfig **out);

// Draws a configuration of `n` i.i.d. points in general position.
//
// # Safety
// `out` must be writable.
enum WcStatus wc_config_sample(enum WcFamily fam,
                               enum WcDistribution dist,
                               size_t n,
                               size_t d,
                               uint64_t seed,
                               struct WcConfig **out);

// Releases a configuration; null is ignored.
//
// # Safety
// `cfg` must come from this library and not be used afterwards.
void wc_config_free(struct WcConfig *cfg);

// Exact JSON of a configuration.
//
// # Safety
// `cfg` must be a live handle; `buf` must point to `cap` writable bytes or be null.
enum WcStatus wc_config_to_json(const struct WcConfig *cfg, char *buf, size_t cap, size_t *needed);

// Number of points, or 0 for a null handle.
//
// # Safety
// `cfg` must be a live handle or null.
size_t wc_config_n(const struct WcConfig *cfg);

// Ambient dimension, or 0 for a null handle.
//
// # Safety
// `cfg` must be a live handle or null.
size_t wc_config_d(const struct WcConfig *cfg);

// Both general-position checks.
//
// # Safety
// All pointers must be valid.
enum WcStatus wc_gp_check(const struct WcConfig *cfg, bool *chainwise, bool *lattice);

// Enumerates the cones; `max_candidates = 0` keeps the default limits.
//
// # Safety
// All pointers must be valid.
enum WcStatus wc_count_cones(const struct WcConfig *cfg, uint64_t max_candidates, uint64_t *out);

// Enumerates the `k`-faces; `max_candidates = 0` keeps the default limits.
//
// # Safety
// All pointers must be valid.
enum WcStatus wc_count_faces(const struct WcConfig *cfg,
                             size_t k,
                             uint64_t max_candidates,
                             uint64_t *out);

// Runs an experiment described by JSON (the format `montecarlo --input`
// reads).
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be writable.
enum WcStatus wc_run_experiment(const char *spec_json,
                                uint64_t max_candidates,
                                struct WcReport **out);

// The report as JSON.
//
// # Safety
// `report` must be a live handle; `buf` must point to `cap` writable bytes or be null.
enum WcStatus wc_report_json(const struct WcReport *report, char *buf, size_t cap, size_t *needed);

// Estimated mean, its standard error, and whether it agreed with the
// closed form.
//
// # Safety
// All pointers must be valid.
enum WcStatus wc_report_summary(const struct WcReport *report,
                                double *mean,
                                double *stderr,
                                bool *passed);

// Releases a report; null is ignored.
//
// # Safety
// `report` must come from this library and not be used afterwards.
void wc_report_free(struct WcReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEYL_CONES_H */
