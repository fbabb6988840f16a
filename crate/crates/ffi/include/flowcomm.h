#ifndef FLOWCOMM_H
#define FLOWCOMM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_ARGUMENT = 2,
  FC_STATUS_MALFORMED_INPUT = 3,
  FC_STATUS_EMPTY_DATASET = 4,
  FC_STATUS_LEVEL_MISMATCH = 5,
  FC_STATUS_INVALID_ID = 6,
  FC_STATUS_CONFLICT = 7,
  FC_STATUS_DEGENERATE_GRAPH = 8,
  FC_STATUS_IO = 9,
  FC_STATUS_PANIC = 10,
} FcStatus;

typedef enum FcLevel {
  FC_LEVEL_SEGMENT = 0,
  FC_LEVEL_SUB_CURVE = 1,
  FC_LEVEL_STREAMLINE = 2,
} FcLevel;

typedef enum FcMeasure {
  FC_MEASURE_SHORTEST = 0,
  FC_MEASURE_LONGEST = 1,
  FC_MEASURE_AVERAGE = 2,
} FcMeasure;

typedef enum FcVariant {
  FC_VARIANT_SEGMENT = 0,
  FC_VARIANT_SUB_CURVE = 1,
  FC_VARIANT_STREAMLINE = 2,
} FcVariant;

// Neighborhood graph at one level.
typedef struct FcCsng FcCsng;

// Loaded streamline dataset.
typedef struct FcDataset FcDataset;

// Community assignment.
typedef struct FcPartition FcPartition;

// Exploration session.
typedef struct FcSession FcSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *fc_last_error(void);

// Library version as a static string.
const char *fc_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void fc_string_free(char *s);

// Parses a dataset from a JSON document `{"streamlines": [...], "labels": [...]}`.
//
// # Safety
// `json` must be a valid C string; `out` a valid pointer.
enum FcStatus fc_dataset_from_json(const char *json, struct FcDataset **out);

// Builds a dataset from packed coordinates: `xyz` holds `3 * Σ lengths`
// doubles, streamline `i` taking the next `lengths[i]` points.
//
// # Safety
// `xyz` and `lengths` must point to arrays of the stated sizes.
enum FcStatus fc_dataset_from_points(const double *xyz,
                                     const size_t *lengths,
                                     size_t n_lines,
                                     struct FcDataset **out);

// Generates labeled parallel bundles.
//
// # Safety
// `out` must be a valid pointer.
enum FcStatus fc_synth_bundles(size_t bundle_count,
                               size_t lines_per_bundle,
                               size_t points_per_line,
                               double gap,
                               double jitter,
                               uint64_t seed,
                               struct FcDataset **out);

// # Safety
// `ds` must be null or a handle from this library.
void fc_dataset_free(struct FcDataset *ds);

// Number of streamlines, or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live handle.
size_t fc_dataset_streamline_count(const struct FcDataset *ds);

// Number of segments, or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live handle.
size_t fc_dataset_segment_count(const struct FcDataset *ds);

// Copies the construction labels into `out` (`len` entries). Fails when
// the dataset has no labels or `len` differs from the streamline count.
//
// # Safety
// `out` must hold `len` writable entries.
enum FcStatus fc_dataset_labels(const struct FcDataset *ds, int64_t *out, size_t len);

// Builds a neighborhood graph. `k > 0` selects kNN; otherwise `radius`
// selects radius search (`radius <= 0` means 10% of the bounding-box
// diagonal).
//
// # Safety
// `ds` must be a live handle; `out` a valid pointer.
enum FcStatus fc_csng_build(const struct FcDataset *ds,
                            enum FcLevel level,
                            size_t k,
                            double radius,
                            enum FcMeasure measure,
                            size_t subcurve_len,
                            struct FcCsng **out);

// # Safety
// `g` must be null or a handle from this library.
void fc_csng_free(struct FcCsng *g);

// # Safety
// `g` must be null or a live handle.
size_t fc_csng_node_count(const struct FcCsng *g);

// Number of edges (directed edges for kNN graphs).
//
// # Safety
// `g` must be null or a live handle.
size_t fc_csng_edge_count(const struct FcCsng *g);

// Whether the graph is directed (kNN).
//
// # Safety
// `g` must be null or a live handle.
bool fc_csng_is_directed(const struct FcCsng *g);

// Runs Louvain detection of the given variant.
//
// # Safety
// `ds` and `g` must be live handles; `out` a valid pointer.
enum FcStatus fc_detect(const struct FcDataset *ds,
                        const struct FcCsng *g,
                        enum FcVariant variant,
                        double resolution,
                        uint64_t seed,
                        struct FcPartition **out);

// # Safety
// `p` must be null or a handle from this library.
void fc_partition_free(struct FcPartition *p);

// # Safety
// `p` must be null or a live handle.
size_t fc_partition_len(const struct FcPartition *p);

// # Safety
// `p` must be null or a live handle.
size_t fc_partition_community_count(const struct FcPartition *p);

// Modularity, or NaN for a null handle.
//
// # Safety
// `p` must be null or a live handle.
double fc_partition_modularity(const struct FcPartition *p);

// Copies the assignment into `out`, which must hold exactly
// `fc_partition_len` entries.
//
// # Safety
// `out` must hold `len` writable entries.
enum FcStatus fc_partition_assignment(const struct FcPartition *p, size_t *out, size_t len);

// Weighted Jaccard of an assignment against labels, both of length `n`.
//
// # Safety
// Both arrays must hold `n` entries; `out` must be valid.
enum FcStatus fc_weighted_jaccard(const size_t *assignment,
                                  const int64_t *labels,
                                  size_t n,
                                  double *out);

// Creates a session from a JSON configuration, e.g.
// `{"strategy":"knn","k":3,"level":"streamline"}`.
//
// # Safety
// `ds` must be live, `config_json` a valid C string, `out` valid.
enum FcStatus fc_session_create(const struct FcDataset *ds,
                                const char *config_json,
                                struct FcSession **out);

// # Safety
// `s` must be null or a handle from this library.
void fc_session_free(struct FcSession *s);

// Applies a command such as `{"op":"split","args":{"node":0}}` and writes
// the outcome as JSON to `out_json`.
//
// # Safety
// `s` must be live, `command_json` a valid C string, `out_json` valid.
enum FcStatus fc_session_apply(struct FcSession *s, const char *command_json, char **out_json);

// Number of leaf communities.
//
// # Safety
// `s` must be null or a live handle.
size_t fc_session_leaf_count(const struct FcSession *s);

// Community summary graph as JSON.
//
// # Safety
// `s` must be live and `out_json` valid.
enum FcStatus fc_session_summary_json(const struct FcSession *s, char **out_json);

// Configuration and command log as JSON.
//
// # Safety
// `s` must be live and `out_json` valid.
enum FcStatus fc_session_export_json(const struct FcSession *s, char **out_json);

// Leaf node id per segment; `out` must hold the dataset's segment count.
//
// # Safety
// `out` must hold `len` writable entries.
enum FcStatus fc_session_colors(const struct FcSession *s, uint64_t *out, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWCOMM_H */
