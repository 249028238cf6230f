/* C interface to the mobrti UWB sensing primitives. */

#ifndef MOBRTI_H
#define MOBRTI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Call outcome. Zero is success; anything else identifies the failure.
 */
typedef enum MobrtiStatus {
  MOBRTI_STATUS_OK = 0,
  MOBRTI_STATUS_NULL_POINTER = 1,
  MOBRTI_STATUS_INVALID_ARGUMENT = 2,
  MOBRTI_STATUS_ALIGNMENT_FAILED = 3,
  MOBRTI_STATUS_EMPTY_WINDOW = 4,
  MOBRTI_STATUS_DIMENSION_MISMATCH = 5,
  MOBRTI_STATUS_SINGULAR_SYSTEM = 6,
  MOBRTI_STATUS_PANIC = 7,
} MobrtiStatus;

/**
 * Opaque streaming presence detector handle.
 */
typedef struct MobrtiDetector MobrtiDetector;

/**
 * Opaque tomographic imager handle: voxel grid, link set, and solver
 * parameters. Weights are rebuilt lazily after link changes.
 */
typedef struct MobrtiImager MobrtiImager;

/**
 * Opaque probe pulse handle.
 */
typedef struct MobrtiPulse MobrtiPulse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mobrti_version(void);

/**
 * Build a band-limited probe pulse. On success `*out` owns the handle;
 * release it with `mobrti_pulse_destroy`.
 *
 * # Safety
 * `out` must be a writable pointer slot.
 */
enum MobrtiStatus mobrti_pulse_create(double center_freq_hz,
                                      double bandwidth_hz,
                                      double sample_period_s,
                                      struct MobrtiPulse **out);

/**
 * Number of samples in the pulse; 0 for a null handle.
 *
 * # Safety
 * `pulse` must be null or a live handle from `mobrti_pulse_create`.
 */
uintptr_t mobrti_pulse_len(const struct MobrtiPulse *pulse);

/**
 * # Safety
 * `pulse` must be a handle returned by `mobrti_pulse_create`, not yet
 * destroyed. Null is ignored.
 */
void mobrti_pulse_destroy(struct MobrtiPulse *pulse);

/**
 * Align a raw capture against the pulse at threshold `rho` and return the
 * early-energy feature over the first `window_s` seconds, in dB. Writes the
 * alignment lag (in samples) to `out_lag` when non-null.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out_e_db` must be
 * writable; `out_lag` may be null.
 */
enum MobrtiStatus mobrti_early_energy(const struct MobrtiPulse *pulse,
                                      const double *samples,
                                      uintptr_t len,
                                      double sample_period_s,
                                      double rho,
                                      double window_s,
                                      double *out_e_db,
                                      uintptr_t *out_lag);

/**
 * Create a moving-average presence detector.
 *
 * # Safety
 * `out` must be a writable pointer slot.
 */
enum MobrtiStatus mobrti_detector_create(double tau,
                                         uintptr_t short_len,
                                         uintptr_t long_len,
                                         uintptr_t event_window,
                                         uintptr_t event_count_threshold,
                                         struct MobrtiDetector **out);

/**
 * Feed one finite early-energy measurement (dB); reports the event and
 * presence flags for this step.
 *
 * # Safety
 * `detector` must be a live handle from `mobrti_detector_create`;
 * `out_event` and `out_presence` must be writable.
 */
enum MobrtiStatus mobrti_detector_update(struct MobrtiDetector *detector,
                                         double e_db,
                                         bool *out_event,
                                         bool *out_presence);

/**
 * # Safety
 * `detector` must be a handle returned by `mobrti_detector_create`, not yet
 * destroyed. Null is ignored.
 */
void mobrti_detector_destroy(struct MobrtiDetector *detector);

/**
 * Create an imager over a row-major voxel grid with the given elliptical
 * weighting and regularization parameters.
 *
 * # Safety
 * `out` must be a writable pointer slot.
 */
enum MobrtiStatus mobrti_imager_create(double origin_x,
                                       double origin_y,
                                       double voxel_size,
                                       uintptr_t nx,
                                       uintptr_t ny,
                                       double excess_path_len_m,
                                       double reg_weight,
                                       double prior_variance,
                                       double corr_distance_m,
                                       struct MobrtiImager **out);

/**
 * Append one static link (transmitter and reference receiver coordinates).
 *
 * # Safety
 * `imager` must be a live handle from `mobrti_imager_create`.
 */
enum MobrtiStatus mobrti_imager_add_link(struct MobrtiImager *imager,
                                         double tx_x,
                                         double tx_y,
                                         double rx_x,
                                         double rx_y);

/**
 * Number of links added so far; 0 for a null handle.
 *
 * # Safety
 * `imager` must be null or a live handle from `mobrti_imager_create`.
 */
uintptr_t mobrti_imager_num_links(const struct MobrtiImager *imager);

/**
 * Number of voxels in the image; 0 for a null handle.
 *
 * # Safety
 * `imager` must be null or a live handle from `mobrti_imager_create`.
 */
uintptr_t mobrti_imager_num_voxels(const struct MobrtiImager *imager);

/**
 * Solve the regularized least-squares image for the measurement vector `y`
 * (one entry per link, in insertion order) and write the voxel intensities
 * to `out_image` in row-major grid order.
 *
 * # Safety
 * `y` must point to `y_len` readable doubles and `out_image` to
 * `mobrti_imager_num_voxels(imager)` writable doubles.
 */
enum MobrtiStatus mobrti_imager_solve(struct MobrtiImager *imager,
                                      const double *y,
                                      uintptr_t y_len,
                                      double *out_image);

/**
 * Peak-intensity localization over an image produced by
 * `mobrti_imager_solve`: writes the argmax voxel centroid and its value.
 *
 * # Safety
 * `image` must point to `image_len` readable doubles; the three outputs
 * must be writable.
 */
enum MobrtiStatus mobrti_imager_localize(const struct MobrtiImager *imager,
                                         const double *image,
                                         uintptr_t image_len,
                                         double *out_x,
                                         double *out_y,
                                         double *out_peak);

/**
 * # Safety
 * `imager` must be a handle returned by `mobrti_imager_create`, not yet
 * destroyed. Null is ignored.
 */
void mobrti_imager_destroy(struct MobrtiImager *imager);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOBRTI_H */
