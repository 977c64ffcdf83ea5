#ifndef STAGEMATCH_H
#define STAGEMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every call.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_ARGUMENT = 2,
  SM_STATUS_INVALID_INSTANCE = 3,
  SM_STATUS_INVALID_PROBLEM = 4,
  SM_STATUS_CAP_EXCEEDED = 5,
  SM_STATUS_PARSE_ERROR = 6,
  SM_STATUS_NOT_FOUND = 7,
  SM_STATUS_PANIC = 8,
} SmStatus;

/**
 * How the rosters change between the two stages.
 */
typedef enum SmVariant {
  SM_VARIANT_WOMEN_ARRIVE = 0,
  SM_VARIANT_MEN_LEAVE = 1,
  SM_VARIANT_LEAVE_AND_ARRIVE = 2,
} SmVariant;

/**
 * Opaque preference instance.
 */
typedef struct SmInstance SmInstance;

/**
 * Opaque matching.
 */
typedef struct SmMatching SmMatching;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread; do not free it.
 */
const char *sm_last_error_message(void);

/**
 * Builds an instance with complete strict lists.
 *
 * `man_ids` and `woman_ids` give the identifiers (NULL means `0..n`).
 * `man_prefs` holds `n_men * n_women` woman identifiers, row `i` being the
 * list of the `i`-th man, best first; `woman_prefs` likewise.
 *
 * # Safety
 * Array pointers must be valid for the stated lengths; `out` must be
 * writable.
 */
enum SmStatus sm_instance_new(size_t n_men,
                              const uint32_t *man_ids,
                              size_t n_women,
                              const uint32_t *woman_ids,
                              const uint32_t *man_prefs,
                              const uint32_t *woman_prefs,
                              struct SmInstance **out);

/**
 * # Safety
 * `inst` must come from this library and not be freed twice. NULL is a no-op.
 */
void sm_instance_free(struct SmInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle; `out_men` and `out_women` writable.
 */
enum SmStatus sm_instance_size(const struct SmInstance *inst, size_t *out_men, size_t *out_women);

/**
 * Deferred acceptance; `men_propose` selects the men-optimal matching,
 * otherwise the women-optimal one.
 *
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum SmStatus sm_deferred_acceptance(const struct SmInstance *inst,
                                     bool men_propose,
                                     struct SmMatching **out);

/**
 * # Safety
 * Handles must be live; `out` writable.
 */
enum SmStatus sm_is_stable(const struct SmInstance *inst, const struct SmMatching *m, bool *out);

/**
 * Number of stable matchings. `cap` of 0 means no limit; otherwise more
 * than `cap` matchings yields `CapExceeded`.
 *
 * # Safety
 * `inst` must be a live handle; `out` writable.
 */
enum SmStatus sm_count_stable(const struct SmInstance *inst, size_t cap, size_t *out);

/**
 * Stable matching of maximum total weight. The `k`-th weight applies to
 * the pair (`men[k]`, `women[k]`); other pairs weigh 0.
 *
 * # Safety
 * Arrays must hold `n_weights` entries; `inst` live; `out` writable.
 */
enum SmStatus sm_max_weight_stable(const struct SmInstance *inst,
                                   size_t n_weights,
                                   const uint32_t *men,
                                   const uint32_t *women,
                                   const int64_t *weights,
                                   struct SmMatching **out);

/**
 * Optimal two-stage solution. Departures are reduced to arrivals
 * internally.
 *
 * # Safety
 * Handles must be live; output pointers writable.
 */
enum SmStatus sm_opt_two_stage(enum SmVariant variant,
                               const struct SmInstance *stage1,
                               const struct SmInstance *stage2,
                               struct SmMatching **out_m1,
                               struct SmMatching **out_m2,
                               size_t *out_divorces);

/**
 * Pairs of `a` missing from `b`.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum SmStatus sm_divorces(const struct SmMatching *a, const struct SmMatching *b, size_t *out);

/**
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum SmStatus sm_matching_len(const struct SmMatching *m, size_t *out);

/**
 * The `index`-th pair in increasing man order.
 *
 * # Safety
 * `m` must be a live handle; outputs writable.
 */
enum SmStatus sm_matching_pair(const struct SmMatching *m,
                               size_t index,
                               uint32_t *out_man,
                               uint32_t *out_woman);

/**
 * Partner of `man`, or `NotFound` if he is single.
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum SmStatus sm_matching_wife(const struct SmMatching *m, uint32_t man, uint32_t *out);

/**
 * # Safety
 * `m` must come from this library and not be freed twice. NULL is a no-op.
 */
void sm_matching_free(struct SmMatching *m);

/**
 * Parses a problem in the text format, solves it and returns the JSON
 * report (free with [`sm_string_free`]). With `oracle`, the report also
 * carries the optimum found by enumeration.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_json` writable.
 */
enum SmStatus sm_solve_text(const char *text, bool oracle, char **out_json);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. NULL is a no-op.
 */
void sm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STAGEMATCH_H */
