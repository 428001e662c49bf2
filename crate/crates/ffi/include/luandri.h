/*
 * Flat C interface to the luandri query environment.
 *
 * Layouts (x86_64 / aarch64, natural alignment):
 *   LuandriFlatRequest  48 bytes: query@0 results_requested@8 (4 bytes, 4 padding)
 *                       doc_ids@16 doc_ids_count@24 stopwords@32 stopwords_count@40
 *   LuandriFlatResult   32 bytes: docid@0 document_name@8 snippet@16 score@24
 */

#ifndef LUANDRI_H
#define LUANDRI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdint.h>

typedef uint64_t LuandriEnvHandle;

typedef int32_t LuandriStatus;

typedef uint64_t LuandriResultSetHandle;

/*
 Search request. All pointers are borrowed for the duration of the call.

 A zero `doc_ids_count` or `stopwords_count` means the option is absent.
 */
typedef struct LuandriFlatRequest {
  /*
   NUL-terminated UTF-8 query text.
   */
  const char *query;
  /*
   Maximum number of results; must be non-negative.
   */
  int32_t results_requested;
  /*
   Array of `doc_ids_count` docids restricting the search.
   */
  const uint64_t *doc_ids;
  int64_t doc_ids_count;
  /*
   Array of `stopwords_count` NUL-terminated UTF-8 stop words.
   */
  const char *const *stopwords;
  int64_t stopwords_count;
} LuandriFlatRequest;

/*
 One ranked result. Strings are owned by the result set.
 */
typedef struct LuandriFlatResult {
  uint64_t docid;
  const char *document_name;
  const char *snippet;
  double score;
} LuandriFlatResult;

#define LUANDRI_OK 0

#define LUANDRI_INVALID_ARGUMENT 1

#define LUANDRI_PARSE_ERROR 2

#define LUANDRI_IO_ERROR 3

#define LUANDRI_INTERNAL_ERROR 4

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates an empty query environment.
 */
LuandriEnvHandle luandri_env_create(void);

/*
 Destroys an environment and every result set it produced.
 */
LuandriStatus luandri_env_destroy(LuandriEnvHandle env);

/*
 Opens the index directory at `path` and adds it to the environment.

 # Safety
 `path` must be null or a NUL-terminated string.
 */
LuandriStatus luandri_env_add_index(LuandriEnvHandle env, const char *path);

/*
 Runs a query. Returns a result-set handle, or 0 on failure. The status is
 written to `status_out` when it is non-null.

 # Safety
 `request` must be null or point to a [`LuandriFlatRequest`] whose pointers
 honor its documented contract; `status_out` must be null or writable.
 */
LuandriResultSetHandle luandri_env_run_query(LuandriEnvHandle env,
                                             const struct LuandriFlatRequest *request,
                                             LuandriStatus *status_out);

/*
 Number of results in the set, or -1 for an unknown handle.
 */
int64_t luandri_results_count(LuandriResultSetHandle results);

/*
 The `index`-th result in rank order. Unknown handles and out-of-range
 indexes yield a sentinel record (docid 0, empty strings, NaN score); an
 out-of-range index also records an invalid-argument message as the owning
 environment's last error.
 */
struct LuandriFlatResult luandri_results_get(LuandriResultSetHandle results, int64_t index);

/*
 Releases a result set and the strings it owns.
 */
LuandriStatus luandri_results_destroy(LuandriResultSetHandle results);

/*
 Message of the most recent failed call on `env`, or an empty string if
 no call has failed yet.
 */
const char *luandri_last_error(LuandriEnvHandle env);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUANDRI_H */
