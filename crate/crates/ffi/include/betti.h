#ifndef BETTI_H
#define BETTI_H

/* Generated by cbindgen from betti-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes mirroring the CLI exit-code taxonomy.
 */
typedef enum {
  BETTI_STATUS_OK = 0,
  BETTI_STATUS_PARSE_ERROR = 1,
  BETTI_STATUS_VALIDATION_ERROR = 2,
  BETTI_STATUS_VERIFY_MISMATCH = 3,
  BETTI_STATUS_IO_ERROR = 4,
  BETTI_STATUS_NULL_POINTER = 5,
} betti_status;

/*
 Opaque simplicial complex handle.
 */
typedef struct betti_complex betti_complex;

/*
 Message describing the most recent error on this thread, or NULL.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *betti_last_error(void);

/*
 Build a complex from the canonical JSON format
 `{"n_points": N, "top_simplexes": [[...], ...], "coords": optional}`.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
betti_status betti_complex_from_json(const char *json, betti_complex **out);

/*
 Generate a named fixture, e.g. `"torus:8,8"`, `"sphere:icosa"`,
 `"genus:2"`, `"three_torus:3"`.

 # Safety
 `shape` must be a NUL-terminated string and `out` a valid pointer.
 */
betti_status betti_complex_generate(const char *shape, betti_complex **out);

/*
 Glue two copies of an open complex along its boundary.

 # Safety
 `k` must be a live handle and `out` a valid pointer.
 */
betti_status betti_complex_double_cover(const betti_complex *k, betti_complex **out);

/*
 Release a complex handle. NULL is ignored.

 # Safety
 `k` must come from a constructor in this library and not be freed twice.
 */
void betti_complex_free(betti_complex *k);

/*
 Top dimension, or -1 for NULL.

 # Safety
 `k` must be a live handle or NULL.
 */
int32_t betti_complex_dim(const betti_complex *k);

/*
 Number of r-simplexes, or -1 for NULL.

 # Safety
 `k` must be a live handle or NULL.
 */
int64_t betti_complex_skeleton_size(const betti_complex *k, uint32_t degree);

/*
 1 when every codimension-one cell bounds exactly two top cells, else 0
 (-1 for NULL).

 # Safety
 `k` must be a live handle or NULL.
 */
int32_t betti_complex_is_closed(const betti_complex *k);

/*
 Euler characteristic.

 # Safety
 `k` must be a live handle or NULL.
 */
int64_t betti_complex_euler(const betti_complex *k);

/*
 Exact Betti number from the integer homology oracle.

 # Safety
 `k` must be a live handle; `out` a valid pointer.
 */
betti_status betti_number_oracle(const betti_complex *k, uint32_t degree, int64_t *out);

/*
 Betti number through the harmonic-projection pipeline (uniform measures,
 exact rank) with the given seed.

 # Safety
 `k` must be a live handle; `out` a valid pointer.
 */
betti_status betti_number_cohomology(const betti_complex *k,
                                     uint32_t degree,
                                     uint64_t seed,
                                     int64_t *out);

/*
 Run the full pipeline over a generated fixture or a complex file path and
 return the JSON report; mirrors the `betti` CLI. `spec` accepts
 `"generate:torus:8,8"` or `"path:/some/file.json"`.

 # Safety
 `spec` must be a NUL-terminated string; `out_json` a valid pointer.
 */
betti_status betti_run_json(const char *spec, uint64_t seed, char **out_json);

/*
 Release a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void betti_string_free(char *s);

#endif  /* BETTI_H */
