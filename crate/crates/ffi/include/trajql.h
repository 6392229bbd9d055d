#ifndef TRAJQL_H
#define TRAJQL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TrajqlStatus {
  TRAJQL_STATUS_OK = 0,
  TRAJQL_STATUS_NULL_ARGUMENT = 1,
  TRAJQL_STATUS_INVALID_UTF8 = 2,
  TRAJQL_STATUS_DATASET = 3,
  TRAJQL_STATUS_SYNTAX = 4,
  TRAJQL_STATUS_VALIDATION = 5,
  TRAJQL_STATUS_GEOMETRY = 6,
  TRAJQL_STATUS_STRICTNESS = 7,
  TRAJQL_STATUS_OUT_OF_RANGE = 8,
  TRAJQL_STATUS_DEGENERATE = 9,
  TRAJQL_STATUS_PANIC = 10,
} TrajqlStatus;

/**
 * A loaded dataset.
 */
typedef struct TrajqlDataset TrajqlDataset;

/**
 * Named regions and intervals.
 */
typedef struct TrajqlEnv TrajqlEnv;

/**
 * A parsed predicate.
 */
typedef struct TrajqlPredicate TrajqlPredicate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * Valid until the next call into this library on the same thread.
 */
const char *trajql_last_error(void);

/**
 * Releases a string returned by this library.
 */
void trajql_string_free(char *s);

/**
 * Loads `path` (plus sibling property files) into `*out`.
 */
enum TrajqlStatus trajql_dataset_load(const char *path, struct TrajqlDataset **out);

void trajql_dataset_free(struct TrajqlDataset *ds);

/**
 * Number of trajectories; 0 for a null handle.
 */
size_t trajql_dataset_len(const struct TrajqlDataset *ds);

/**
 * Identifier of the trajectory at `index`, owned by the dataset; null when
 * out of range.
 */
const char *trajql_dataset_tid(const struct TrajqlDataset *ds, size_t index);

/**
 * Parses predicate text into `*out`.
 */
enum TrajqlStatus trajql_predicate_parse(const char *src, struct TrajqlPredicate **out);

/**
 * Canonical text of a predicate; release with [`trajql_string_free`].
 */
char *trajql_predicate_format(const struct TrajqlPredicate *p);

void trajql_predicate_free(struct TrajqlPredicate *p);

struct TrajqlEnv *trajql_env_new(void);

void trajql_env_free(struct TrajqlEnv *env);

enum TrajqlStatus trajql_env_add_region(struct TrajqlEnv *env,
                                        const char *name,
                                        double x_min,
                                        double y_min,
                                        double x_max,
                                        double y_max);

enum TrajqlStatus trajql_env_add_interval(struct TrajqlEnv *env,
                                          const char *name,
                                          double start,
                                          double end);

/**
 * Evaluates `p` on every trajectory of `ds`. Writes 1 (selected) or 0 into
 * `mask[i]` for trajectory `i`; `mask_len` must equal the dataset length.
 * `strictness` is `strict`, `relaxed` or `approx:<name>[:k]`.
 */
enum TrajqlStatus trajql_select(const struct TrajqlDataset *ds,
                                const struct TrajqlPredicate *p,
                                const struct TrajqlEnv *env,
                                const char *strictness_text,
                                uint8_t *mask,
                                size_t mask_len);

/**
 * Interval relation of trajectory `index` against `(start, end)`, as a
 * position in the list returned by [`trajql_allen_label_name`].
 */
enum TrajqlStatus trajql_classify_allen(const struct TrajqlDataset *ds,
                                        size_t index,
                                        double start,
                                        double end,
                                        uint32_t *out_label);

/**
 * Topological relations of trajectory `index` against the rectangle, as a
 * bit mask: bit `k` set means label `k` of [`trajql_de9im_label_name`] holds.
 */
enum TrajqlStatus trajql_classify_de9im(const struct TrajqlDataset *ds,
                                        size_t index,
                                        double x_min,
                                        double y_min,
                                        double x_max,
                                        double y_max,
                                        const char *strictness_text,
                                        bool normalize_orientation,
                                        uint32_t *out_mask);

/**
 * Name of topological label `k` (0..19), or null.
 */
const char *trajql_de9im_label_name(uint32_t k);

/**
 * Name of interval label `k` (0..13), or null.
 */
const char *trajql_allen_label_name(uint32_t k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRAJQL_H */
