#ifndef APSP_FFI_H
#define APSP_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define APSP_INF INT64_MAX

#define APSP_NEG_INF INT64_MIN

typedef enum ApspAlgorithm {
  APSP_ALGORITHM_RAND = 0,
  APSP_ALGORITHM_DET = 1,
  APSP_ALGORITHM_UNWEIGHTED = 2,
  APSP_ALGORITHM_NAIVE = 3,
} ApspAlgorithm;

typedef enum ApspStatus {
  APSP_STATUS_OK = 0,
  /**
   * The solve finished and the graph has a negative cycle; the solution
   * handle is still filled in.
   */
  APSP_STATUS_NEGATIVE_CYCLE = 1,
  APSP_STATUS_NULL_POINTER = -1,
  APSP_STATUS_INVALID_ARGUMENT = -2,
  APSP_STATUS_PARSE_ERROR = -3,
  APSP_STATUS_OUT_OF_RANGE = -4,
  APSP_STATUS_NO_PATH = -5,
  APSP_STATUS_BUFFER_TOO_SMALL = -6,
  APSP_STATUS_OVERFLOW = -7,
  APSP_STATUS_INTERNAL = -8,
} ApspStatus;

/**
 * A directed graph under construction.
 */
typedef struct ApspGraph ApspGraph;

/**
 * Distances plus whatever is needed to recover paths.
 */
typedef struct ApspSolution ApspSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * call that fails.
 */
const char *apsp_last_error(void);

/**
 * Creates an empty graph on `n` vertices.
 *
 * # Safety
 * `out` must be a valid pointer to writable memory.
 */
enum ApspStatus apsp_graph_new(size_t n, struct ApspGraph **out);

/**
 * Adds the arc `from -> to`. Parallel arcs keep the lightest.
 *
 * # Safety
 * `graph` must come from this library and not have been freed.
 */
enum ApspStatus apsp_graph_add_arc(struct ApspGraph *graph, size_t from, size_t to, int64_t weight);

/**
 * Parses a DIMACS shortest-path file held in a NUL-terminated string.
 *
 * # Safety
 * `text` must be a valid C string and `out` writable.
 */
enum ApspStatus apsp_graph_from_dimacs(const char *text, struct ApspGraph **out);

/**
 * # Safety
 * `graph` must be null or come from this library, and is invalid afterwards.
 */
void apsp_graph_free(struct ApspGraph *graph);

/**
 * # Safety
 * `graph` must come from this library.
 */
size_t apsp_graph_vertex_count(const struct ApspGraph *graph);

/**
 * Exact distances. Returns `NegativeCycle` with `*out` set when some
 * distances are `APSP_NEG_INF`.
 *
 * # Safety
 * `graph` must come from this library and `out` must be writable.
 */
enum ApspStatus apsp_solve(const struct ApspGraph *graph,
                           enum ApspAlgorithm algorithm,
                           uint64_t seed,
                           struct ApspSolution **out);

/**
 * Distances within a factor `1 + epsilon` for nonnegative weights.
 *
 * # Safety
 * `graph` must come from this library and `out` must be writable.
 */
enum ApspStatus apsp_approx(const struct ApspGraph *graph,
                            double epsilon,
                            uint64_t seed,
                            struct ApspSolution **out);

/**
 * # Safety
 * `solution` must be null or come from this library, and is invalid afterwards.
 */
void apsp_solution_free(struct ApspSolution *solution);

/**
 * # Safety
 * `solution` must come from this library.
 */
size_t apsp_solution_vertex_count(const struct ApspSolution *solution);

/**
 * # Safety
 * `solution` must come from this library and `out` must be writable.
 */
enum ApspStatus apsp_solution_distance(const struct ApspSolution *solution,
                                       size_t from,
                                       size_t to,
                                       int64_t *out);

/**
 * Copies the row-major `n * n` distance matrix into `buf`.
 *
 * # Safety
 * `buf` must have room for `len` values.
 */
enum ApspStatus apsp_solution_distances(const struct ApspSolution *solution,
                                        int64_t *buf,
                                        size_t len);

/**
 * Writes a shortest path from `from` to `to` into `buf` and its vertex
 * count into `*len`. When `cap` is too small, only `*len` is written and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `buf` must have room for `cap` values and `len` must be writable.
 */
enum ApspStatus apsp_solution_path(const struct ApspSolution *solution,
                                   size_t from,
                                   size_t to,
                                   size_t *buf,
                                   size_t cap,
                                   size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APSP_FFI_H */
