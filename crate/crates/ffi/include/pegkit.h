#ifndef PEGKIT_H
#define PEGKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum PegStatus {
  PEG_STATUS_OK = 0,
  PEG_STATUS_NULL_POINTER = 1,
  PEG_STATUS_INPUT = 3,
  PEG_STATUS_CAPACITY = 4,
  PEG_STATUS_UNSUPPORTED = 5,
  PEG_STATUS_RULES = 6,
  PEG_STATUS_PROTOCOL = 7,
  PEG_STATUS_VALIDATION = 8,
  PEG_STATUS_IO = 9,
  /**
   * The buffer passed in is too small.
   */
  PEG_STATUS_BUFFER_TOO_SMALL = 10,
  PEG_STATUS_PANIC = 99,
} PegStatus;

/**
 * An undirected graph plus the exits listed in its file.
 */
typedef struct PegGraph PegGraph;

/**
 * A validated game definition.
 */
typedef struct PegSpec PegSpec;

/**
 * A solved step table.
 */
typedef struct PegTable PegTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *peg_last_error(void);

/**
 * Parses a graph file (line format or JSON).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PegStatus peg_graph_parse(const char *text, struct PegGraph **out);

/**
 * Builds a `width` x `height` grid graph.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PegStatus peg_graph_grid(uint32_t width, uint32_t height, struct PegGraph **out);

/**
 * # Safety
 * `graph` must come from this library or be null.
 */
uint32_t peg_graph_node_count(const struct PegGraph *graph);

/**
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void peg_graph_free(struct PegGraph *graph);

/**
 * Creates a game on `graph`. A negative `capture_radius`, a zero
 * `capture_threshold` or a zero `discount` selects the default. The graph's own exits are used; the graph handle may
 * be freed afterwards.
 *
 * # Safety
 * `graph` and `out` must be valid pointers.
 */
enum PegStatus peg_spec_new(const struct PegGraph *graph,
                            uint32_t pursuers,
                            int32_t capture_radius,
                            uint32_t capture_threshold,
                            double discount,
                            struct PegSpec **out);

/**
 * Stable identifier of the game; zero for a null handle.
 *
 * # Safety
 * `spec` must come from this library or be null.
 */
uint64_t peg_spec_fingerprint(const struct PegSpec *spec);

/**
 * # Safety
 * `spec` must come from this library and not be used afterwards.
 */
void peg_spec_free(struct PegSpec *spec);

/**
 * Solves a no-exit game. `state_cap` of zero keeps the default limit.
 *
 * # Safety
 * `spec` and `out` must be valid pointers.
 */
enum PegStatus peg_table_solve(const struct PegSpec *spec,
                               uint64_t state_cap,
                               struct PegTable **out);

/**
 * Loads a table saved for `spec`.
 *
 * # Safety
 * `spec`, `path` and `out` must be valid pointers.
 */
enum PegStatus peg_table_load(const struct PegSpec *spec, const char *path, struct PegTable **out);

/**
 * # Safety
 * `table` and `path` must be valid pointers.
 */
enum PegStatus peg_table_save(const struct PegTable *table, const char *path);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards.
 */
void peg_table_free(struct PegTable *table);

/**
 * Steps to forced capture from a state; `u32::MAX` when the evader can
 * avoid capture forever.
 *
 * # Safety
 * All pointers must be valid; `pursuers` holds one node per pursuer.
 */
enum PegStatus peg_table_steps(const struct PegTable *table,
                               const struct PegSpec *spec,
                               const uint32_t *pursuers,
                               uint32_t evader,
                               uint32_t *out);

/**
 * Equilibrium joint pursuer move; writes one node per pursuer to `out`,
 * which must hold `out_len` entries.
 *
 * # Safety
 * All pointers must be valid for the given lengths.
 */
enum PegStatus peg_pursuer_action(const struct PegTable *table,
                                  const struct PegSpec *spec,
                                  const uint32_t *pursuers,
                                  uint32_t evader,
                                  uint32_t *out,
                                  uintptr_t out_len);

/**
 * Equilibrium evader move.
 *
 * # Safety
 * All pointers must be valid; `pursuers` holds one node per pursuer.
 */
enum PegStatus peg_evader_action(const struct PegTable *table,
                                 const struct PegSpec *spec,
                                 const uint32_t *pursuers,
                                 uint32_t evader,
                                 uint32_t *out);

/**
 * Discounted equilibrium value of a state.
 *
 * # Safety
 * All pointers must be valid; `pursuers` holds one node per pursuer.
 */
enum PegStatus peg_nash_value(const struct PegTable *table,
                              const struct PegSpec *spec,
                              const uint32_t *pursuers,
                              uint32_t evader,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEGKIT_H */
