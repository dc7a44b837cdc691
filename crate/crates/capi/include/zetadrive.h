/* C interface to the zetadrive two-level-drive simulator. */

#ifndef ZETADRIVE_H
#define ZETADRIVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum ZdStatus {
  /**
   * Success.
   */
  ZD_STATUS_OK = 0,
  /**
   * A parameter was out of range or otherwise malformed.
   */
  ZD_STATUS_INVALID_INPUT = 1,
  /**
   * The computation failed to converge or left its valid domain.
   */
  ZD_STATUS_NUMERICAL = 2,
  /**
   * A required pointer argument was null.
   */
  ZD_STATUS_NULL_POINTER = 3,
} ZdStatus;

/**
 * Transform selector accepted by the `target` arguments.
 */
typedef enum ZdTarget {
  ZD_TARGET_RIEMANN = 0,
  ZD_TARGET_POLYA = 1,
} ZdTarget;

/**
 * Opaque drive profile: one (target, E, omega) waveform plus its
 * propagation defaults.
 */
typedef struct ZdProfile ZdProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never null, never
 * freed by the caller.
 */
const char *zd_version(void);

/**
 * Builds a drive profile for `target` (0 = Riemann, 1 = Polya) at spectral
 * parameter `e` with time-compression `omega >= 1`, and stores the handle
 * in `*out`. On any failure `*out` is left untouched.
 */
enum ZdStatus zd_profile_new(int target, double e, double omega, struct ZdProfile **out);

/**
 * Releases a profile handle. Passing null is a no-op; passing the same
 * handle twice is undefined behavior.
 */
void zd_profile_free(struct ZdProfile *profile);

/**
 * Accumulated drive phase F at lab time `t` (the waveform repeats omega
 * times per base period). Writes the value to `*out`.
 */
enum ZdStatus zd_phase(const struct ZdProfile *profile, double t, double *out);

/**
 * Positive quasi-energy of the one-period propagator, in units of the
 * base drive frequency, folded to [0, 1/2]. Writes the value to `*out`.
 */
enum ZdStatus zd_quasi_energy(const struct ZdProfile *profile, double *out);

/**
 * Sum over `periods` stroboscopic samples of P_plus(m) - 1/2, starting
 * from |0>. Exact probabilities, no shot noise. Writes the sum to `*out`.
 */
enum ZdStatus zd_sor(const struct ZdProfile *profile, uint32_t periods, double *out);

/**
 * Reference transform value at `e` (full-range quadrature, independent of
 * any drive). Writes the value to `*out`.
 */
enum ZdStatus zd_oracle_xi(int target, double e, double *out);

/**
 * Bisects the reference transform for a zero inside [lo, hi]; the ends
 * must straddle a sign change. Writes the root to `*out`.
 */
enum ZdStatus zd_oracle_zero(int target, double lo, double hi, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ZETADRIVE_H */
