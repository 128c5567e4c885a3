/* Copyright 2026 IonGate Contributors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef IONGATE_H
#define IONGATE_H

/* Generated by cbindgen from crates/iongate-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum IgStatus {
  IG_STATUS_OK = 0,
  IG_STATUS_NULL_POINTER = 1,
  IG_STATUS_INVALID_ARGUMENT = 2,
  IG_STATUS_CONFIG = 3,
  IG_STATUS_NUMERIC = 4,
  IG_STATUS_IO = 5,
  IG_STATUS_PANIC = 6,
} IgStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct IgConfig IgConfig;

/**
 * Maximum-likelihood parity-fringe fit.
 */
typedef struct IgFitResult {
  double contrast;
  double offset;
  double phase;
  double contrast_err;
  double offset_err;
  double phase_err;
  double log_likelihood;
  bool at_boundary;
} IgFitResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ig_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ig_version(void);

/**
 * Build a configuration from a built-in profile name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum IgStatus ig_config_from_profile(const char *name, struct IgConfig **out);

/**
 * Parse and validate a TOML configuration.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum IgStatus ig_config_from_toml(const char *text, struct IgConfig **out);

/**
 * Release a configuration. Null is accepted.
 *
 * # Safety
 * `cfg` must come from an `ig_config_*` constructor and not be used afterwards.
 */
void ig_config_free(struct IgConfig *cfg);

/**
 * Override the master seed.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum IgStatus ig_config_set_seed(struct IgConfig *cfg, uint64_t seed);

/**
 * Write the 64-character configuration hash plus NUL into `buf`.
 *
 * # Safety
 * `cfg` must be a live handle and `buf` must hold `len` bytes.
 */
enum IgStatus ig_config_hash(const struct IgConfig *cfg, char *buf, size_t len);

/**
 * Total gate error of the configured error budget.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum IgStatus ig_budget_total(const struct IgConfig *cfg, double *out);

/**
 * Spin-echo sequence error at gate duration `t_g` seconds.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum IgStatus ig_spin_echo_error(const struct IgConfig *cfg, double t_g, double *out);

/**
 * Expected per-qubit readout errors of the configured detection model.
 *
 * # Safety
 * `cfg` must be a live handle; `eps_down` and `eps_up` writable.
 */
enum IgStatus ig_spam_exact(const struct IgConfig *cfg, double *eps_down, double *eps_up);

/**
 * Maximum-likelihood fit of even-parity counts at `n` analysis phases.
 *
 * # Safety
 * The three input arrays must hold `n` elements; `out` must be writable.
 */
enum IgStatus ig_fit_parity_ml(const double *phases,
                               const uint64_t *even_counts,
                               const uint64_t *shots,
                               size_t n,
                               struct IgFitResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IONGATE_H */
