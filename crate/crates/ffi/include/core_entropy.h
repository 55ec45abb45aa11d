#ifndef CORE_ENTROPY_H
#define CORE_ENTROPY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CeStatus {
  CE_STATUS_OK = 0,
  CE_STATUS_NULL_POINTER = 1,
  CE_STATUS_INVALID_UTF8 = 2,
  CE_STATUS_INVALID_PORTRAIT = 3,
  CE_STATUS_BUDGET = 4,
  CE_STATUS_NUMERICAL = 5,
  CE_STATUS_BUFFER_TOO_SMALL = 6,
  CE_STATUS_INVALID_ARGUMENT = 7,
} CeStatus;

/**
 * Opaque portrait handle.
 */
typedef struct CePortrait CePortrait;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a portrait given as JSON, e.g.
 * `{"degree":3,"leaves":[["0","1/3"],["7/15","4/5"]]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CeStatus ce_portrait_from_json(const char *json, struct CePortrait **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from `ce_portrait_from_json` and not be used afterwards.
 */
void ce_portrait_free(struct CePortrait *p);

/**
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum CeStatus ce_portrait_degree(const struct CePortrait *p, uint32_t *out);

/**
 * Number of leaves and polygons.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum CeStatus ce_portrait_size(const struct CePortrait *p, size_t *out);

/**
 * 1 if the portrait is a primitive major, 0 otherwise.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum CeStatus ce_portrait_is_primitive(const struct CePortrait *p, int32_t *out);

/**
 * Spectral radius and entropy from the finite transition matrix. Either
 * output pointer may be null.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be valid.
 */
enum CeStatus ce_core_entropy(const struct CePortrait *p, double *out_rho, double *out_entropy);

/**
 * Growth rate of the non-diagonal wedge graph truncated at `bound`.
 *
 * # Safety
 * `p` must be a live handle and `out_rate` a valid pointer.
 */
enum CeStatus ce_growth_rate(const struct CePortrait *p, size_t bound, double *out_rate);

/**
 * Grid estimate of the distance between the induced majors: a lower bound
 * and a guaranteed upper bound.
 *
 * # Safety
 * Handles must be live; outputs valid.
 */
enum CeStatus ce_major_distance(const struct CePortrait *a,
                                const struct CePortrait *b,
                                size_t resolution,
                                double *out_value,
                                double *out_upper);

/**
 * Hausdorff distance between the unions of the leaves in the closed disk.
 *
 * # Safety
 * Handles must be live; `out` valid.
 */
enum CeStatus ce_hausdorff_distance(const struct CePortrait *a,
                                    const struct CePortrait *b,
                                    double *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated)
 * and stores its length, without the terminator, in `out_len`. Returns
 * `BufferTooSmall` when `len` cannot hold it; `buf` may be null to query the
 * length.
 *
 * # Safety
 * `buf` must hold `len` bytes when non-null; `out_len` must be valid.
 */
enum CeStatus ce_last_error_message(char *buf, size_t len, size_t *out_len);

/**
 * Static NUL-terminated version string.
 */
const char *ce_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORE_ENTROPY_H */
