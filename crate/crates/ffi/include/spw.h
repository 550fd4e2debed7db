#ifndef SPW_H
#define SPW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpwStatus {
  SPW_STATUS_OK = 0,
  SPW_STATUS_NULL_ARGUMENT = 1,
  SPW_STATUS_INVALID_UTF8 = 2,
  SPW_STATUS_SYNTAX = 3,
  SPW_STATUS_INVALID_INSTANCE = 4,
  SPW_STATUS_OUTSIDE_FREE_SPACE = 5,
  SPW_STATUS_DISCONNECTED = 6,
  SPW_STATUS_OUT_OF_RANGE = 7,
  SPW_STATUS_INTERNAL = 8,
} SpwStatus;

/**
 * A validated polygonal domain with source and target.
 */
typedef struct SpwInstance SpwInstance;

/**
 * A solved shortest path, in input coordinates.
 */
typedef struct SpwResult SpwResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call on the same thread.
 */
const char *spw_last_error(void);

/**
 * Parses an instance from a NUL-terminated JSON document.
 *
 * # Safety
 * `json` must be null or a valid C string; `out` must be null or writable.
 */
enum SpwStatus spw_instance_from_json(const char *json, struct SpwInstance **out);

/**
 * Builds an instance from flat `x, y` arrays. `outer` holds `outer_len`
 * points; the holes are concatenated in `holes` with `hole_lens[i]` points
 * each. `s` and `t` point at two doubles.
 *
 * # Safety
 * Every non-null pointer must reference at least the stated number of
 * elements. `holes` and `hole_lens` may be null when `hole_count` is 0.
 */
enum SpwStatus spw_instance_new(const double *outer,
                                size_t outer_len,
                                const double *holes,
                                const size_t *hole_lens,
                                size_t hole_count,
                                const double *s,
                                const double *t,
                                struct SpwInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from this library, not yet freed.
 */
void spw_instance_free(struct SpwInstance *inst);

/**
 * Shortest path by wavefront propagation.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum SpwStatus spw_solve(const struct SpwInstance *inst, struct SpwResult **out);

/**
 * Shortest path by the visibility-graph reference.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum SpwStatus spw_oracle(const struct SpwInstance *inst, struct SpwResult **out);

/**
 * Path length, or NaN for a null handle.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double spw_result_distance(const struct SpwResult *res);

/**
 * Number of path vertices, s and t included.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
size_t spw_result_path_len(const struct SpwResult *res);

/**
 * Copies vertex `i` of the path into `xy[0..2]`.
 *
 * # Safety
 * `res` must be a live handle and `xy` must hold two doubles.
 */
enum SpwStatus spw_result_path_point(const struct SpwResult *res, size_t i, double *xy);

/**
 * # Safety
 * `res` must be null or a handle from this library, not yet freed.
 */
void spw_result_free(struct SpwResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPW_H */
