#ifndef INVGC_H
#define INVGC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum InvgcStatus {
  INVGC_STATUS_OK = 0,
  INVGC_STATUS_NULL_POINTER = 1,
  INVGC_STATUS_INVALID_ARGUMENT = 2,
  INVGC_STATUS_IO = 3,
  /**
   * Malformed file contents, duplicate ids or non-finite values.
   */
  INVGC_STATUS_FORMAT = 4,
  INVGC_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * Too few points, or queries without a resolvable relevant item.
   */
  INVGC_STATUS_INSUFFICIENT_DATA = 6,
  INVGC_STATUS_PANIC = 7,
} InvgcStatus;

typedef enum InvgcVariant {
  INVGC_VARIANT_FULL = 0,
  /**
   * Top-k% neighbourhood with raw weights; `param` is k.
   */
  INVGC_VARIANT_LOCAL = 1,
  /**
   * Top-p% neighbourhood with unit weights; `param` is p.
   */
  INVGC_VARIANT_AVGPOOL = 2,
} InvgcVariant;

/**
 * Opaque embedding set.
 */
typedef struct InvgcEmbeddings InvgcEmbeddings;

/**
 * Opaque query-to-gallery relevance map.
 */
typedef struct InvgcRelevance InvgcRelevance;

/**
 * Retrieval metrics; recalls are percentages.
 */
typedef struct InvgcMetrics {
  double recall_at_1;
  double recall_at_5;
  double recall_at_10;
  double median_rank;
  double mean_rank;
} InvgcMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *invgc_version(void);

/**
 * Message for the most recent failed call on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *invgc_last_error(void);

/**
 * Builds a set from `rows * dim` row-major values, with ids "0".."rows-1".
 *
 * # Safety
 * `data` must point to `rows * dim` readable doubles; `out` must be writable.
 */
enum InvgcStatus invgc_embeddings_new(const double *data,
                                      size_t rows,
                                      size_t dim,
                                      struct InvgcEmbeddings **out);

/**
 * Loads a binary (`IGCE`) or, for `.tsv`/`.txt` paths, TSV embedding file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum InvgcStatus invgc_embeddings_load(const char *path, struct InvgcEmbeddings **out);

/**
 * Saves in the format implied by the path, as [`invgc_embeddings_load`].
 *
 * # Safety
 * `set` must be a live handle and `path` a NUL-terminated string.
 */
enum InvgcStatus invgc_embeddings_save(const struct InvgcEmbeddings *set, const char *path);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void invgc_embeddings_free(struct InvgcEmbeddings *set);

/**
 * Row count, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t invgc_embeddings_rows(const struct InvgcEmbeddings *set);

/**
 * Dimension, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t invgc_embeddings_dim(const struct InvgcEmbeddings *set);

/**
 * Copies the row-major values into `buf`, which holds `len` doubles and
 * must fit `rows * dim` of them.
 *
 * # Safety
 * `set` must be a live handle; `buf` must be writable for `len` doubles.
 */
enum InvgcStatus invgc_embeddings_copy_data(const struct InvgcEmbeddings *set,
                                            double *buf,
                                            size_t len);

/**
 * Applies inverse graph convolution to `gallery` and returns a new set.
 * `param` is the neighbourhood percentage for `LOCAL` and `AVGPOOL` and is
 * ignored for `FULL`.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum InvgcStatus invgc_apply(const struct InvgcEmbeddings *gallery,
                             const struct InvgcEmbeddings *ref_gallery,
                             const struct InvgcEmbeddings *ref_query,
                             enum InvgcVariant variant,
                             double param,
                             double r_g,
                             double r_q,
                             struct InvgcEmbeddings **out);

/**
 * Mean similarity of every point to its nearest neighbour in the set.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum InvgcStatus invgc_degeneration_score(const struct InvgcEmbeddings *set, double *out);

/**
 * Loads `query_id<TAB>gallery_id` lines.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum InvgcStatus invgc_relevance_load(const char *path, struct InvgcRelevance **out);

/**
 * # Safety
 * `rel` must be NULL or a handle not yet freed.
 */
void invgc_relevance_free(struct InvgcRelevance *rel);

/**
 * R@1/5/10, median and mean rank of `queries` against `gallery`.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum InvgcStatus invgc_evaluate(const struct InvgcEmbeddings *queries,
                                const struct InvgcEmbeddings *gallery,
                                const struct InvgcRelevance *rel,
                                struct InvgcMetrics *out);

/**
 * Exact fraction of the unit `n`-ball cut off by a cap of radius `b`.
 *
 * # Safety
 * `out` must be writable.
 */
enum InvgcStatus invgc_cap_fraction_exact(size_t n, double b, double *out);

/**
 * Monte Carlo estimate of [`invgc_cap_fraction_exact`] and its standard
 * error. Deterministic for a given seed.
 *
 * # Safety
 * `estimate` and `stderr_out` must be writable.
 */
enum InvgcStatus invgc_cap_fraction_mc(size_t n,
                                       double b,
                                       uint64_t samples,
                                       uint64_t seed,
                                       double *estimate,
                                       double *stderr_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVGC_H */
