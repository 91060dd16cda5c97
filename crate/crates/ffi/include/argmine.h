#ifndef ARGMINE_H
#define ARGMINE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ArgmineStatus {
  ARGMINE_STATUS_OK = 0,
  ARGMINE_STATUS_NULL_POINTER = 1,
  ARGMINE_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed graph document.
   */
  ARGMINE_STATUS_PARSE = 3,
  /**
   * The graph breaks a structural invariant.
   */
  ARGMINE_STATUS_INVALID_GRAPH = 4,
  ARGMINE_STATUS_IO = 5,
  ARGMINE_STATUS_CONFIG = 6,
  /**
   * The pipeline found no argumentative unit in the text.
   */
  ARGMINE_STATUS_NO_ARGUMENT = 7,
  /**
   * Any other failure, including a caught panic.
   */
  ARGMINE_STATUS_INTERNAL = 8,
} ArgmineStatus;

typedef struct ArgmineGraph ArgmineGraph;

typedef struct ArgminePipeline ArgminePipeline;

typedef struct ArgmineCounts {
  size_t inodes;
  size_t snodes;
  size_t edges;
} ArgmineCounts;

typedef struct ArgmineReport {
  double inode;
  uint8_t major_claim;
  double snode;
  double edge;
  double time_s;
} ArgmineReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *argmine_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *argmine_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void argmine_string_free(char *s);

/**
 * Parses an AIF JSON document. The major claim is optional.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ArgmineStatus argmine_graph_from_json(const char *json, struct ArgmineGraph **out);

/**
 * # Safety
 * `graph` must be null or a handle from this library, freed at most once.
 */
void argmine_graph_free(struct ArgmineGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum ArgmineStatus argmine_graph_to_json(const struct ArgmineGraph *graph, char **out);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum ArgmineStatus argmine_graph_to_dot(const struct ArgmineGraph *graph, char **out);

/**
 * Writes the number of invariant violations to `count`. A non-zero count
 * still returns `Ok`; the violations are joined into the last error message.
 *
 * # Safety
 * `graph` must be a live handle and `count` a valid pointer.
 */
enum ArgmineStatus argmine_graph_validate(const struct ArgmineGraph *graph, size_t *count);

/**
 * Number of layers of a valid graph.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum ArgmineStatus argmine_graph_depth(const struct ArgmineGraph *graph, size_t *out);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum ArgmineStatus argmine_graph_counts(const struct ArgmineGraph *graph,
                                        struct ArgmineCounts *out);

/**
 * Edit distance in characters.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
 */
enum ArgmineStatus argmine_levenshtein(const char *a, const char *b, size_t *out);

/**
 * Normalized similarity of two node texts in [0, 1].
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
 */
enum ArgmineStatus argmine_node_similarity(const char *a, const char *b, double *out);

/**
 * Scores `generated` against `benchmark`, reading stances from the
 * generated graph. `elapsed_s` is copied into the report.
 *
 * # Safety
 * Both graphs must be live handles and `out` a valid pointer.
 */
enum ArgmineStatus argmine_evaluate_pair(const struct ArgmineGraph *benchmark,
                                         const struct ArgmineGraph *generated,
                                         double elapsed_s,
                                         struct ArgmineReport *out);

/**
 * Builds a pipeline from a config file, or from the defaults and bundled
 * sample models when `config_path` is null.
 *
 * # Safety
 * `config_path` must be null or a NUL-terminated string; `out` must be valid.
 */
enum ArgmineStatus argmine_pipeline_new(const char *config_path, struct ArgminePipeline **out);

/**
 * # Safety
 * `pipeline` must be null or a handle from this library, freed at most once.
 */
void argmine_pipeline_free(struct ArgminePipeline *pipeline);

/**
 * Mines `text` into a new graph handle. Returns `NoArgument` with a null
 * graph when nothing argumentative is found; `elapsed_s` may be null.
 *
 * # Safety
 * `pipeline` must be a live handle, `text` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum ArgmineStatus argmine_pipeline_mine(const struct ArgminePipeline *pipeline,
                                         const char *text,
                                         struct ArgmineGraph **out,
                                         double *elapsed_s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARGMINE_H */
