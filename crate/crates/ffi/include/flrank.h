#ifndef FLRANK_H
#define FLRANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FlStatus {
  FL_STATUS_OK = 0,
  // A required pointer argument was null.
  FL_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  FL_STATUS_INVALID_UTF8 = 2,
  // An argument was out of range or inconsistent.
  FL_STATUS_INVALID_ARGUMENT = 3,
  // Input data could not be read or is malformed.
  FL_STATUS_DATA = 4,
  // The bundle lacks what the technique needs.
  FL_STATUS_NOT_RUNNABLE = 5,
  // An internal panic was caught.
  FL_STATUS_PANIC = 6,
} FlStatus;

// Loaded defect bundle.
typedef struct FlBundle FlBundle;

// Ranked list of statement ids. Item strings live as long as the list.
typedef struct FlRankedList FlRankedList;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, e.g. `0.1.0 (format 1)`. The string is static.
const char *fl_version(void);

// Message for the last failed call on this thread, or an empty string.
// Valid until the next flrank call on the same thread.
const char *fl_last_error_message(void);

// Loads the bundle in directory `path` into `*out`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum FlStatus fl_bundle_load(const char *path, struct FlBundle **out);

// Frees a bundle. Null is ignored.
//
// # Safety
// `bundle` must come from [`fl_bundle_load`] and not be used afterwards.
void fl_bundle_free(struct FlBundle *bundle);

// Number of statements in the bundle, or 0 for null.
//
// # Safety
// `bundle` must be null or a live bundle handle.
size_t fl_bundle_statement_count(const struct FlBundle *bundle);

// Ranks statements by Ochiai suspiciousness.
//
// # Safety
// `bundle` must be a live bundle handle and `out` a writable pointer.
enum FlStatus fl_rank_sbfl(const struct FlBundle *bundle, struct FlRankedList **out);

// Ranks statements by bug-report similarity (the six-configuration ensemble).
//
// # Safety
// `bundle` must be a live bundle handle and `out` a writable pointer.
enum FlStatus fl_rank_blues(const struct FlBundle *bundle, struct FlRankedList **out);

// Fuses the spectrum and bug-report rankings with the given seed.
//
// # Safety
// `bundle` must be a live bundle handle and `out` a writable pointer.
enum FlStatus fl_rank_sbir(const struct FlBundle *bundle, uint64_t seed, struct FlRankedList **out);

// Aggregates `count` lists into one top-`k` list.
//
// `distance` is 0 for Spearman footrule, 1 for Kendall tau. `weights` may be
// null for equal weights.
//
// # Safety
// `lists` must point to `count` live list handles, `weights` (if non-null) to
// `count` doubles, and `out` must be writable.
enum FlStatus fl_rank_aggregate(const struct FlRankedList *const *lists,
                                const double *weights,
                                size_t count,
                                size_t k,
                                uint32_t distance,
                                uint64_t seed,
                                struct FlRankedList **out);

// Number of entries, or 0 for null.
//
// # Safety
// `list` must be null or a live list handle.
size_t fl_ranked_list_len(const struct FlRankedList *list);

// Item id at 0-based `index`, or null when out of range. The string is
// owned by the list.
//
// # Safety
// `list` must be null or a live list handle.
const char *fl_ranked_list_item(const struct FlRankedList *list, size_t index);

// Score at 0-based `index`, or NaN when out of range.
//
// # Safety
// `list` must be null or a live list handle.
double fl_ranked_list_score(const struct FlRankedList *list, size_t index);

// 1-based rank of `item`, or 0 when absent.
//
// # Safety
// `list` must be null or a live list handle; `item` a NUL-terminated string.
size_t fl_ranked_list_rank_of(const struct FlRankedList *list, const char *item);

// Serializes the list as JSON into `*out`; free it with [`fl_string_free`].
//
// # Safety
// `list` must be a live list handle and `out` a writable pointer.
enum FlStatus fl_ranked_list_to_json(const struct FlRankedList *list, char **out);

// Frees a list. Null is ignored.
//
// # Safety
// `list` must come from this library and not be used afterwards.
void fl_ranked_list_free(struct FlRankedList *list);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void fl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLRANK_H */
