#ifndef TOPICFORGE_H
#define TOPICFORGE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every fallible function.
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_ARGUMENT = 1,
  TF_STATUS_INVALID_UTF8 = 2,
  TF_STATUS_IO = 3,
  TF_STATUS_PARSE = 4,
  TF_STATUS_EMPTY_CORPUS = 5,
  TF_STATUS_INVALID_HYPERPARAMS = 6,
  TF_STATUS_ARCHIVE_MISMATCH = 7,
  TF_STATUS_INVALID_ARGUMENT = 8,
  TF_STATUS_PANIC = 9,
} TfStatus;

// Opaque preprocessed corpus.
typedef struct TfCorpus TfCorpus;

// Opaque trained model.
typedef struct TfModel TfModel;

// Training settings. Obtain defaults from [`tf_hyperparams_default`].
typedef struct TfHyperparams {
  size_t num_topics;
  double alpha;
  double beta;
  size_t iterations;
  uint64_t seed;
} TfHyperparams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL after a
// successful call. Valid until the next `tf_*` call on the same thread.
const char *tf_last_error(void);

// Reads a JSONL or CSV file (CSV columns `text` and `id`), runs the
// preprocessing pipeline, and builds a corpus. `stopwords_path` may be NULL
// to use the bundled English list.
//
// # Safety
// Path arguments must be NULL or NUL-terminated strings; `out` must be
// writable.
enum TfStatus tf_corpus_preprocess(const char *input_path,
                                   const char *stopwords_path,
                                   uint32_t min_token_count,
                                   struct TfCorpus **out);

// Loads a corpus archive directory.
//
// # Safety
// `dir` must be a NUL-terminated string; `out` must be writable.
enum TfStatus tf_corpus_load(const char *dir, struct TfCorpus **out);

// Writes a corpus archive directory.
//
// # Safety
// `corpus` must be a live handle; `dir` a NUL-terminated string.
enum TfStatus tf_corpus_save(const struct TfCorpus *corpus, const char *dir);

// Releases a corpus. NULL is ignored.
//
// # Safety
// `corpus` must come from this library and not be used afterwards.
void tf_corpus_free(struct TfCorpus *corpus);

// Documents kept, token count and vocabulary size. Any output pointer may be
// NULL.
//
// # Safety
// `corpus` must be a live handle; non-NULL outputs must be writable.
enum TfStatus tf_corpus_stats(const struct TfCorpus *corpus,
                              size_t *num_docs,
                              size_t *num_tokens,
                              size_t *vocab_size);

// Default settings for `num_topics` topics.
struct TfHyperparams tf_hyperparams_default(size_t num_topics);

// Trains a model by collapsed Gibbs sampling.
//
// # Safety
// `corpus` and `params` must be valid; `out` must be writable.
enum TfStatus tf_model_train(const struct TfCorpus *corpus,
                             const struct TfHyperparams *params,
                             struct TfModel **out);

// Writes a model archive directory.
//
// # Safety
// `model` must be a live handle; `dir` a NUL-terminated string.
enum TfStatus tf_model_save(const struct TfModel *model, const char *dir);

// Loads a model archive trained on `corpus`. Fails with
// `TfStatus::ArchiveMismatch` if it was trained on a different corpus.
//
// # Safety
// `dir` must be a NUL-terminated string, `corpus` a live handle, `out`
// writable.
enum TfStatus tf_model_load(const char *dir, const struct TfCorpus *corpus, struct TfModel **out);

// Releases a model. NULL is ignored.
//
// # Safety
// `model` must come from this library and not be used afterwards.
void tf_model_free(struct TfModel *model);

// Number of topics, or 0 for NULL.
//
// # Safety
// `model` must be NULL or a live handle.
size_t tf_model_num_topics(const struct TfModel *model);

// Writes the topic distribution of document `doc` into `out`, which must
// hold exactly `len == num_topics` values.
//
// # Safety
// `model` must be a live handle; `out` must point to `len` writable doubles.
enum TfStatus tf_model_doc_topics(const struct TfModel *model, size_t doc, double *out, size_t len);

// Most probable topic of document `doc`.
//
// # Safety
// `model` must be a live handle; `out` writable.
enum TfStatus tf_model_hard_label(const struct TfModel *model, size_t doc, size_t *out);

// Normalized mutual information between two labelings of `len` documents.
//
// # Safety
// `x` and `y` must each point to `len` readable values; `out` writable.
enum TfStatus tf_nmi(const uint32_t *x, const uint32_t *y, size_t len, double *out);

// Mean and standard deviation of per-topic coherence over the top `top_m`
// words.
//
// # Safety
// Handles must be live; `mean_col` and `sd` writable.
enum TfStatus tf_model_coherence(const struct TfModel *model,
                                 const struct TfCorpus *corpus,
                                 size_t top_m,
                                 double *mean_col,
                                 double *sd);

// Full evaluation report as a JSON string. Release it with
// [`tf_string_free`].
//
// # Safety
// Handles must be live; `out` writable.
enum TfStatus tf_model_eval_json(const struct TfModel *model,
                                 const struct TfCorpus *corpus,
                                 size_t top_m,
                                 char **out);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void tf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPICFORGE_H */
