#ifndef GNN_REDUCE_H
#define GNN_REDUCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Passed as depth or grade to mean "unbounded".
 */
#define GR_UNBOUNDED UINT64_MAX

/**
 * Result of a fallible call.
 */
typedef enum GrStatus {
  GR_STATUS_OK = 0,
  GR_STATUS_NULL_POINTER = 1,
  GR_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed input file or string.
   */
  GR_STATUS_FORMAT = 3,
  GR_STATUS_IO = 4,
  GR_STATUS_INVARIANT = 5,
  GR_STATUS_VERIFICATION_FAILED = 6,
  GR_STATUS_PANIC = 7,
} GrStatus;

/**
 * Representative choice for [`gr_compress`].
 */
typedef enum GrPolicy {
  GR_POLICY_MIN_INCIDENCE = 0,
  GR_POLICY_FIRST_NODE = 1,
} GrPolicy;

/**
 * A colored multigraph plus the external id of each node.
 */
typedef struct GrGraph GrGraph;

/**
 * A reduct together with the refinement and substitution that produced it.
 */
typedef struct GrReduct GrReduct;

/**
 * Refinement partitions of a graph.
 */
typedef struct GrRefinement GrRefinement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gr_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gr_version(void);

/**
 * Builds a graph on nodes `0..node_count` from `edge_count` edges.
 * `mult` may be null (all multiplicities 1); `colors` may be null (one color
 * for all nodes), otherwise it holds `node_count` color strings.
 *
 * # Safety
 * Non-null array arguments must point to at least the stated number of
 * elements; color strings must be NUL-terminated.
 */
enum GrStatus gr_graph_new(size_t node_count,
                           const uint64_t *src,
                           const uint64_t *dst,
                           const uint64_t *mult,
                           size_t edge_count,
                           const char *const *colors,
                           struct GrGraph **out);

/**
 * Loads an edge list and optional color file (null for none).
 *
 * # Safety
 * Paths must be NUL-terminated; `out` must be writable.
 */
enum GrStatus gr_graph_load(const char *edge_path,
                            const char *color_path,
                            bool undirected,
                            struct GrGraph **out);

/**
 * # Safety
 * `graph` must be null or a live handle; it is invalid afterwards.
 */
void gr_graph_free(struct GrGraph *graph);

/**
 * Node count (0 for a null handle).
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t gr_graph_node_count(const struct GrGraph *graph);

/**
 * Number of distinct (source, target) pairs (0 for a null handle).
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t gr_graph_edge_count(const struct GrGraph *graph);

/**
 * External id of node `index` (its index for graphs built in memory).
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum GrStatus gr_graph_node_id(const struct GrGraph *graph, size_t index, uint64_t *out);

/**
 * Refines `graph` for `depth` rounds (or [`GR_UNBOUNDED`]) at grade
 * `grade` (or [`GR_UNBOUNDED`] for ungraded).
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum GrStatus gr_refine(const struct GrGraph *graph,
                        uint64_t depth,
                        uint64_t grade,
                        struct GrRefinement **out);

/**
 * # Safety
 * `refinement` must be null or a live handle; it is invalid afterwards.
 */
void gr_refinement_free(struct GrRefinement *refinement);

/**
 * Writes the stable round into `out`, or returns `InvalidArgument` if the
 * requested depth was reached first.
 *
 * # Safety
 * `refinement` must be a live handle; `out` must be writable.
 */
enum GrStatus gr_refinement_stable_round(const struct GrRefinement *refinement, uint64_t *out);

/**
 * Number of classes at `round`.
 *
 * # Safety
 * `refinement` must be a live handle; `out` must be writable.
 */
enum GrStatus gr_refinement_class_count(const struct GrRefinement *refinement,
                                        size_t round,
                                        size_t *out);

/**
 * Writes the class id of every node at `round` into `classes`, which must
 * hold at least node-count entries. Ids number classes by first occurrence.
 *
 * # Safety
 * `refinement` must be a live handle; `classes` must hold `len` entries.
 */
enum GrStatus gr_refinement_classes(const struct GrRefinement *refinement,
                                    size_t round,
                                    uint32_t *classes,
                                    size_t len);

/**
 * Builds the reduct of `graph` at (`depth`, `grade`).
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum GrStatus gr_compress(const struct GrGraph *graph,
                          uint64_t depth,
                          uint64_t grade,
                          enum GrPolicy policy,
                          struct GrReduct **out);

/**
 * # Safety
 * `reduct` must be null or a live handle; it is invalid afterwards.
 */
void gr_reduct_free(struct GrReduct *reduct);

/**
 * Reduct node count (0 for a null handle).
 *
 * # Safety
 * `reduct` must be null or a live handle.
 */
size_t gr_reduct_node_count(const struct GrReduct *reduct);

/**
 * Reduct edge count, one per distinct (source, target) pair.
 *
 * # Safety
 * `reduct` must be null or a live handle.
 */
size_t gr_reduct_edge_count(const struct GrReduct *reduct);

/**
 * Writes reduct edges as original node indices, sorted by (source, target).
 * Each array must hold at least edge-count entries.
 *
 * # Safety
 * `reduct` must be a live handle; arrays must hold `len` entries.
 */
enum GrStatus gr_reduct_edges(const struct GrReduct *reduct,
                              uint64_t *src,
                              uint64_t *dst,
                              uint64_t *mult,
                              size_t len);

/**
 * Writes, for every original node, the original index of its
 * representative. `out` must hold at least original node-count entries.
 *
 * # Safety
 * `reduct` must be a live handle; `out` must hold `len` entries.
 */
enum GrStatus gr_reduct_representatives(const struct GrReduct *reduct, uint64_t *out, size_t len);

/**
 * Checks that every node and its representative get equal colors in
 * every round up to the reduct's depth. Returns `VerificationFailed` with
 * the witness in [`gr_last_error`] otherwise.
 *
 * # Safety
 * Both handles must be live, and `reduct` must come from `graph`.
 */
enum GrStatus gr_reduct_verify(const struct GrGraph *graph, const struct GrReduct *reduct);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GNN_REDUCE_H */
