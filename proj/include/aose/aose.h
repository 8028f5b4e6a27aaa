/*
 * C interface to the sentence-attention document classifier.
 *
 * Every function returning aose_status leaves a human-readable message in
 * aose_last_error() (per thread) when it fails. Strings handed out through
 * `char**` parameters are NUL-terminated, heap-allocated and released with
 * aose_string_free(). Opaque handles are released with their _free function;
 * passing NULL to any _free function is a no-op.
 */
#ifndef AOSE_H
#define AOSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AOSE_BUILDING_LIBRARY)
#    define AOSE_API __declspec(dllexport)
#  else
#    define AOSE_API __declspec(dllimport)
#  endif
#else
#  define AOSE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aose_status {
    AOSE_OK = 0,
    AOSE_ERR_INVALID_ARGUMENT = 1,
    AOSE_ERR_SHAPE = 2,
    AOSE_ERR_PARSE = 3,
    AOSE_ERR_IO = 4,
    AOSE_ERR_NON_FINITE = 5,
    AOSE_ERR_INTERNAL = 6
} aose_status;

AOSE_API const char* aose_version(void);
AOSE_API const char* aose_status_name(aose_status status);
AOSE_API const char* aose_last_error(void);
AOSE_API void aose_string_free(char* s);

/* ---- text ---------------------------------------------------------------- */

AOSE_API aose_status aose_strip_html(const char* text, size_t len, char** out);
AOSE_API size_t aose_count_tokens(const char* text, size_t len);

typedef struct aose_segment_config {
    size_t min_tokens;    /* default 5 */
    size_t max_tokens;    /* default 250 */
    size_t doc_token_cap; /* default 8192 */
} aose_segment_config;

AOSE_API void aose_segment_config_default(aose_segment_config* cfg);

/* Dataset JSONL ({"id","text","label"} per line) to sentence JSONL. An input
 * without documents is rejected. */
AOSE_API aose_status aose_segment_dataset(const char* dataset_jsonl, size_t len,
                                          const aose_segment_config* cfg,
                                          char** sentences_jsonl, size_t* doc_count);

/* ---- embeddings ---------------------------------------------------------- */

typedef struct aose_corpus aose_corpus;

/* Writes `dimension` doubles to `out`. */
AOSE_API aose_status aose_toy_encode(const char* text, size_t len, size_t dimension,
                                     uint64_t seed, double* out);

/* Sentence JSONL to an embedding corpus. label_count == 0 infers max+1. */
AOSE_API aose_status aose_encode_toy_corpus(const char* sentences_jsonl, size_t len,
                                            size_t dimension, uint64_t seed,
                                            size_t label_count, aose_corpus** out);

/* `renormalized` (optional) receives the number of vectors whose norm was
 * off by more than 1e-6. */
AOSE_API aose_status aose_corpus_parse(const char* jsonl, size_t len, aose_corpus** out,
                                       size_t* renormalized);
AOSE_API aose_status aose_corpus_read_file(const char* path, aose_corpus** out,
                                           size_t* renormalized);
AOSE_API aose_status aose_corpus_serialize(const aose_corpus* corpus, char** out, size_t* len);
AOSE_API aose_status aose_corpus_write_file(const aose_corpus* corpus, const char* path);
AOSE_API void aose_corpus_free(aose_corpus* corpus);

AOSE_API size_t aose_corpus_dimension(const aose_corpus* corpus);
AOSE_API size_t aose_corpus_label_count(const aose_corpus* corpus);
AOSE_API size_t aose_corpus_document_count(const aose_corpus* corpus);

/* ---- training ------------------------------------------------------------ */

typedef enum aose_train_mode {
    AOSE_TRAIN_FROZEN = 0,
    AOSE_TRAIN_INPUT_GRADS = 1
} aose_train_mode;

typedef struct aose_train_config {
    double learning_rate;      /* default 2e-5 */
    size_t batch_size;         /* default 16 */
    size_t accumulation_steps; /* default 1 */
    size_t epochs;             /* default 50 */
    uint64_t seed;             /* default 42 */
    aose_train_mode mode;      /* default AOSE_TRAIN_FROZEN */
    size_t threads;            /* default 1 */
} aose_train_config;

typedef struct aose_epoch_metrics {
    size_t epoch;
    double mean_loss;
    double accuracy;
    double seconds;
    double mean_input_grad_norm;
} aose_epoch_metrics;

typedef struct aose_model aose_model;

AOSE_API void aose_train_config_default(aose_train_config* cfg);

/* Initial parameters for the corpus shape, as train() would start from. */
AOSE_API aose_status aose_model_init(size_t dimension, size_t label_count, uint64_t seed,
                                     aose_model** out);
AOSE_API aose_status aose_train(const aose_corpus* corpus, const aose_train_config* cfg,
                                aose_model** out);

AOSE_API size_t aose_model_dimension(const aose_model* model);
AOSE_API size_t aose_model_label_count(const aose_model* model);
AOSE_API aose_status aose_model_train_config(const aose_model* model, aose_train_config* out);
/* Metrics recorded by aose_train; zero for loaded or initialized models. */
AOSE_API size_t aose_model_epoch_count(const aose_model* model);
AOSE_API aose_status aose_model_epoch_metrics(const aose_model* model, size_t epoch,
                                              aose_epoch_metrics* out);

AOSE_API aose_status aose_model_serialize(const aose_model* model, char** out, size_t* len);
AOSE_API aose_status aose_model_parse(const char* json, size_t len, aose_model** out);
AOSE_API aose_status aose_model_save_file(const aose_model* model, const char* path);
AOSE_API aose_status aose_model_load_file(const char* path, aose_model** out);
AOSE_API void aose_model_free(aose_model* model);

/* `sentences` holds t rows of d doubles. weights_out (t) and document_out (d)
 * may each be NULL. */
AOSE_API aose_status aose_model_pool(const aose_model* model, const double* sentences,
                                     size_t t, size_t d, double* weights_out,
                                     double* document_out);
/* logits_out (K) may be NULL. */
AOSE_API aose_status aose_model_predict(const aose_model* model, const double* sentences,
                                        size_t t, size_t d, double* logits_out,
                                        size_t* label_out);

/* ---- evaluation and statistics ------------------------------------------- */

typedef struct aose_eval_report {
    size_t threshold;
    size_t n_all, n_short, n_long;
    size_t correct_all, correct_short, correct_long;
} aose_eval_report;

AOSE_API aose_status aose_evaluate(const aose_model* model, const aose_corpus* corpus,
                                   size_t threshold, aose_eval_report* out);
AOSE_API aose_status aose_eval_report_json(const aose_eval_report* report, char** out);
AOSE_API aose_status aose_eval_report_table(const aose_eval_report* report, char** out);

typedef size_t (*aose_token_count_fn)(const char* text, size_t len, void* user);

typedef struct aose_dataset_stats {
    size_t doc_count;
    size_t long_doc_count;
    size_t max_tokens;
    size_t label_count;
    size_t threshold;
    int has_mean; /* 0 for an empty dataset */
    double mean_tokens;
} aose_dataset_stats;

/* counter == NULL selects the built-in whitespace/punctuation counter. */
AOSE_API aose_status aose_dataset_stats_compute(const char* dataset_jsonl, size_t len,
                                                size_t threshold, aose_token_count_fn counter,
                                                void* user, aose_dataset_stats* out);
AOSE_API aose_status aose_dataset_stats_json(const aose_dataset_stats* stats, char** out);
AOSE_API aose_status aose_dataset_stats_table(const aose_dataset_stats* stats, char** out);

/* ---- cost model ---------------------------------------------------------- */

typedef struct aose_cost_query {
    uint64_t t, l, g, w, c;
} aose_cost_query;

typedef struct aose_cost_report {
    uint64_t roberta, smith, longformer, xlnet, aose;
} aose_cost_report;

typedef struct aose_head_param_count {
    uint64_t transform, bias, context, classifier, total;
} aose_head_param_count;

AOSE_API aose_status aose_costs(const aose_cost_query* query, aose_cost_report* out);
AOSE_API aose_status aose_cost_csv(const aose_cost_query* queries, size_t count, char** out);
/* Sweep syntax: "t=1:100,l=20,g=2,w=4,c=512" (value or start:end[:step]). */
AOSE_API aose_status aose_cost_sweep_csv(const char* spec, char** out);
AOSE_API aose_status aose_count_head_params(uint64_t dimension, uint64_t label_count,
                                            aose_head_param_count* out);

#ifdef __cplusplus
}
#endif

#endif /* AOSE_H */
