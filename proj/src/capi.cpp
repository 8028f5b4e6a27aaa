#include "aose/aose.h"

#include "aose/attention_pool.hpp"
#include "aose/classifier_trainer.hpp"
#include "aose/cost_model.hpp"
#include "aose/embeddings.hpp"
#include "aose/error.hpp"
#include "aose/eval_stats.hpp"
#include "aose/segmenter.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#ifndef AOSE_VERSION_STRING
#define AOSE_VERSION_STRING "0.0.0"
#endif

struct aose_corpus {
    aose::EmbeddingCorpus corpus;
};

struct aose_model {
    aose::HeadModel model;
    aose::TrainConfig config;
    std::vector<aose::EpochMetrics> epochs;
};

namespace {

thread_local std::string g_last_error;

aose_status status_of(aose::ErrorCode code) {
    switch (code) {
    case aose::ErrorCode::InvalidArgument: return AOSE_ERR_INVALID_ARGUMENT;
    case aose::ErrorCode::ShapeMismatch: return AOSE_ERR_SHAPE;
    case aose::ErrorCode::Parse: return AOSE_ERR_PARSE;
    case aose::ErrorCode::Io: return AOSE_ERR_IO;
    case aose::ErrorCode::NonFinite: return AOSE_ERR_NON_FINITE;
    }
    return AOSE_ERR_INTERNAL;
}

template <class Fn>
aose_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return AOSE_OK;
    } catch (const aose::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return AOSE_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return AOSE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return AOSE_ERR_INTERNAL;
    }
}

template <class T>
void require(const T* p, const char* name) {
    if (p == nullptr) {
        throw aose::Error(aose::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
    }
}

std::string_view view(const char* data, size_t len) {
    if (data == nullptr && len != 0) {
        throw aose::Error(aose::ErrorCode::InvalidArgument, "input buffer is NULL");
    }
    return data == nullptr ? std::string_view() : std::string_view(data, len);
}

char* export_string(const std::string& s, size_t* len = nullptr) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size());
    out[s.size()] = '\0';
    if (len != nullptr) *len = s.size();
    return out;
}

std::ifstream open_in(const char* path) {
    require(path, "path");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw aose::Error(aose::ErrorCode::Io, std::string("cannot open '") + path + "' for reading");
    return in;
}

void write_file(const char* path, const std::string& contents) {
    require(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw aose::Error(aose::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw aose::Error(aose::ErrorCode::Io, std::string("failed writing '") + path + "'");
}

aose::TrainConfig to_cpp(const aose_train_config& c) {
    aose::TrainConfig cfg;
    cfg.learning_rate = c.learning_rate;
    cfg.batch_size = c.batch_size;
    cfg.accumulation_steps = c.accumulation_steps;
    cfg.epochs = c.epochs;
    cfg.seed = c.seed;
    if (c.mode != AOSE_TRAIN_FROZEN && c.mode != AOSE_TRAIN_INPUT_GRADS) {
        throw aose::Error(aose::ErrorCode::InvalidArgument, "unknown training mode");
    }
    cfg.mode = c.mode == AOSE_TRAIN_FROZEN ? aose::TrainMode::Frozen : aose::TrainMode::InputGrads;
    cfg.threads = c.threads;
    return cfg;
}

aose_train_config to_c(const aose::TrainConfig& c) {
    aose_train_config cfg;
    cfg.learning_rate = c.learning_rate;
    cfg.batch_size = c.batch_size;
    cfg.accumulation_steps = c.accumulation_steps;
    cfg.epochs = c.epochs;
    cfg.seed = c.seed;
    cfg.mode = c.mode == aose::TrainMode::Frozen ? AOSE_TRAIN_FROZEN : AOSE_TRAIN_INPUT_GRADS;
    cfg.threads = c.threads;
    return cfg;
}

aose::EvalReport to_cpp(const aose_eval_report& r) {
    aose::EvalReport out;
    out.threshold = r.threshold;
    out.n_all = r.n_all;
    out.n_short = r.n_short;
    out.n_long = r.n_long;
    out.correct_all = r.correct_all;
    out.correct_short = r.correct_short;
    out.correct_long = r.correct_long;
    return out;
}

aose::DatasetStats to_cpp(const aose_dataset_stats& s) {
    aose::DatasetStats out;
    out.doc_count = s.doc_count;
    out.long_doc_count = s.long_doc_count;
    out.max_tokens = s.max_tokens;
    out.label_count = s.label_count;
    out.threshold = s.threshold;
    if (s.has_mean) out.mean_tokens = s.mean_tokens;
    return out;
}

std::vector<aose::Vector> rows_of(const double* data, size_t t, size_t d) {
    if (t == 0) throw aose::Error(aose::ErrorCode::InvalidArgument, "at least one sentence is required");
    require(data, "sentences");
    std::vector<aose::Vector> rows;
    rows.reserve(t);
    for (size_t i = 0; i < t; ++i) {
        rows.push_back(aose::Vector::checked(std::vector<double>(data + i * d, data + (i + 1) * d)));
    }
    return rows;
}

void check_model_dim(const aose_model* model, size_t d) {
    require(model, "model");
    if (d != model->model.dimension()) {
        throw aose::Error(aose::ErrorCode::ShapeMismatch,
                          "sentence dimension " + std::to_string(d) + " does not match model dimension " +
                              std::to_string(model->model.dimension()));
    }
}

// Adapts a C counting callback; only counts, so it cannot drive segmentation.
class CallbackCounter final : public aose::TokenCounter {
public:
    CallbackCounter(aose_token_count_fn fn, void* user) : fn_(fn), user_(user) {}

    std::vector<aose::TokenSpan> tokenize(std::string_view) const override {
        throw aose::Error(aose::ErrorCode::InvalidArgument, "callback counters only support counting");
    }
    std::size_t count(std::string_view text) const override {
        return fn_(text.data(), text.size(), user_);
    }

private:
    aose_token_count_fn fn_;
    void* user_;
};

} // namespace

extern "C" {

const char* aose_version(void) { return AOSE_VERSION_STRING; }

const char* aose_status_name(aose_status status) {
    switch (status) {
    case AOSE_OK: return "ok";
    case AOSE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AOSE_ERR_SHAPE: return "shape mismatch";
    case AOSE_ERR_PARSE: return "parse error";
    case AOSE_ERR_IO: return "i/o error";
    case AOSE_ERR_NON_FINITE: return "non-finite value";
    case AOSE_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* aose_last_error(void) { return g_last_error.c_str(); }

void aose_string_free(char* s) { std::free(s); }

aose_status aose_strip_html(const char* text, size_t len, char** out) {
    return guarded([&] {
        require(out, "out");
        *out = export_string(aose::strip_html(view(text, len)));
    });
}

size_t aose_count_tokens(const char* text, size_t len) {
    if (text == nullptr) return 0;
    return aose::count_tokens(std::string_view(text, len));
}

void aose_segment_config_default(aose_segment_config* cfg) {
    if (cfg == nullptr) return;
    const aose::SegmentConfig defaults;
    cfg->min_tokens = defaults.min_tokens;
    cfg->max_tokens = defaults.max_tokens;
    cfg->doc_token_cap = defaults.doc_token_cap;
}

aose_status aose_segment_dataset(const char* dataset_jsonl, size_t len, const aose_segment_config* cfg,
                                 char** sentences_jsonl, size_t* doc_count) {
    return guarded([&] {
        require(cfg, "cfg");
        require(sentences_jsonl, "sentences_jsonl");
        aose::SegmentConfig config;
        config.min_tokens = cfg->min_tokens;
        config.max_tokens = cfg->max_tokens;
        config.doc_token_cap = cfg->doc_token_cap;
        config.validate();

        std::istringstream in{std::string(view(dataset_jsonl, len))};
        const auto docs = aose::read_dataset(in);
        if (docs.empty()) throw aose::Error(aose::ErrorCode::InvalidArgument, "no documents");
        std::ostringstream out;
        for (const auto& doc : docs) aose::write_sentences(out, doc, aose::segment(doc, config));
        *sentences_jsonl = export_string(out.str());
        if (doc_count != nullptr) *doc_count = docs.size();
    });
}

aose_status aose_toy_encode(const char* text, size_t len, size_t dimension, uint64_t seed, double* out) {
    return guarded([&] {
        require(out, "out");
        const aose::Vector v = aose::toy_encode(view(text, len), dimension, aose::Seed{seed});
        std::copy(v.begin(), v.end(), out);
    });
}

aose_status aose_encode_toy_corpus(const char* sentences_jsonl, size_t len, size_t dimension,
                                   uint64_t seed, size_t label_count, aose_corpus** out) {
    return guarded([&] {
        require(out, "out");
        std::istringstream in{std::string(view(sentences_jsonl, len))};
        const auto records = aose::read_sentences(in);
        if (records.empty()) throw aose::Error(aose::ErrorCode::InvalidArgument, "no sentences");
        auto corpus = aose::encode_sentences(
            records, dimension, aose::Seed{seed},
            label_count == 0 ? std::nullopt : std::optional<std::size_t>(label_count));
        *out = new aose_corpus{std::move(corpus)};
    });
}

aose_status aose_corpus_parse(const char* jsonl, size_t len, aose_corpus** out, size_t* renormalized) {
    return guarded([&] {
        require(out, "out");
        std::istringstream in{std::string(view(jsonl, len))};
        auto load = aose::read_corpus(in);
        if (renormalized != nullptr) *renormalized = load.renormalized;
        *out = new aose_corpus{std::move(load.corpus)};
    });
}

aose_status aose_corpus_read_file(const char* path, aose_corpus** out, size_t* renormalized) {
    return guarded([&] {
        require(out, "out");
        auto in = open_in(path);
        auto load = aose::read_corpus(in);
        if (renormalized != nullptr) *renormalized = load.renormalized;
        *out = new aose_corpus{std::move(load.corpus)};
    });
}

aose_status aose_corpus_serialize(const aose_corpus* corpus, char** out, size_t* len) {
    return guarded([&] {
        require(corpus, "corpus");
        require(out, "out");
        std::ostringstream s;
        aose::write_corpus(s, corpus->corpus);
        *out = export_string(s.str(), len);
    });
}

aose_status aose_corpus_write_file(const aose_corpus* corpus, const char* path) {
    return guarded([&] {
        require(corpus, "corpus");
        std::ostringstream s;
        aose::write_corpus(s, corpus->corpus);
        write_file(path, s.str());
    });
}

void aose_corpus_free(aose_corpus* corpus) { delete corpus; }

size_t aose_corpus_dimension(const aose_corpus* corpus) { return corpus ? corpus->corpus.dimension : 0; }
size_t aose_corpus_label_count(const aose_corpus* corpus) { return corpus ? corpus->corpus.label_count : 0; }
size_t aose_corpus_document_count(const aose_corpus* corpus) {
    return corpus ? corpus->corpus.documents.size() : 0;
}

void aose_train_config_default(aose_train_config* cfg) {
    if (cfg != nullptr) *cfg = to_c(aose::TrainConfig{});
}

aose_status aose_model_init(size_t dimension, size_t label_count, uint64_t seed, aose_model** out) {
    return guarded([&] {
        require(out, "out");
        if (dimension == 0 || label_count < 2) {
            throw aose::Error(aose::ErrorCode::InvalidArgument, "model needs dimension >= 1 and at least two labels");
        }
        aose::TrainConfig cfg;
        cfg.seed = seed;
        *out = new aose_model{aose::HeadModel::initialize(dimension, label_count, aose::Seed{seed}), cfg, {}};
    });
}

aose_status aose_train(const aose_corpus* corpus, const aose_train_config* cfg, aose_model** out) {
    return guarded([&] {
        require(corpus, "corpus");
        require(cfg, "cfg");
        require(out, "out");
        const aose::TrainConfig config = to_cpp(*cfg);
        auto result = aose::train(corpus->corpus, config);
        *out = new aose_model{std::move(result.model), config, std::move(result.epochs)};
    });
}

size_t aose_model_dimension(const aose_model* model) { return model ? model->model.dimension() : 0; }
size_t aose_model_label_count(const aose_model* model) { return model ? model->model.label_count() : 0; }

aose_status aose_model_train_config(const aose_model* model, aose_train_config* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = to_c(model->config);
    });
}

size_t aose_model_epoch_count(const aose_model* model) { return model ? model->epochs.size() : 0; }

aose_status aose_model_epoch_metrics(const aose_model* model, size_t epoch, aose_epoch_metrics* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        if (epoch >= model->epochs.size()) {
            throw aose::Error(aose::ErrorCode::InvalidArgument, "epoch index out of range");
        }
        const auto& m = model->epochs[epoch];
        *out = {m.epoch, m.mean_loss, m.accuracy, m.seconds, m.mean_input_grad_norm};
    });
}

aose_status aose_model_serialize(const aose_model* model, char** out, size_t* len) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        std::ostringstream s;
        aose::save_checkpoint(s, {model->model, model->config});
        *out = export_string(s.str(), len);
    });
}

aose_status aose_model_parse(const char* json, size_t len, aose_model** out) {
    return guarded([&] {
        require(out, "out");
        std::istringstream in{std::string(view(json, len))};
        auto ckpt = aose::load_checkpoint(in);
        *out = new aose_model{std::move(ckpt.model), ckpt.config, {}};
    });
}

aose_status aose_model_save_file(const aose_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        std::ostringstream s;
        aose::save_checkpoint(s, {model->model, model->config});
        write_file(path, s.str());
    });
}

aose_status aose_model_load_file(const char* path, aose_model** out) {
    return guarded([&] {
        require(out, "out");
        auto in = open_in(path);
        auto ckpt = aose::load_checkpoint(in);
        *out = new aose_model{std::move(ckpt.model), ckpt.config, {}};
    });
}

void aose_model_free(aose_model* model) { delete model; }

aose_status aose_model_pool(const aose_model* model, const double* sentences, size_t t, size_t d,
                            double* weights_out, double* document_out) {
    return guarded([&] {
        check_model_dim(model, d);
        const auto rows = rows_of(sentences, t, d);
        const auto r = aose::pool_forward(model->model.attention, rows);
        if (weights_out != nullptr) std::copy(r.weights.begin(), r.weights.end(), weights_out);
        if (document_out != nullptr) std::copy(r.document.begin(), r.document.end(), document_out);
    });
}

aose_status aose_model_predict(const aose_model* model, const double* sentences, size_t t, size_t d,
                               double* logits_out, size_t* label_out) {
    return guarded([&] {
        check_model_dim(model, d);
        const auto rows = rows_of(sentences, t, d);
        const auto r = aose::pool_forward(model->model.attention, rows);
        const auto logits = aose::classify(model->model.classifier, r.document);
        if (logits_out != nullptr) std::copy(logits.begin(), logits.end(), logits_out);
        if (label_out != nullptr) *label_out = aose::predict(logits);
    });
}

aose_status aose_evaluate(const aose_model* model, const aose_corpus* corpus, size_t threshold,
                          aose_eval_report* out) {
    return guarded([&] {
        require(model, "model");
        require(corpus, "corpus");
        require(out, "out");
        const auto r = aose::evaluate(model->model, corpus->corpus, threshold, model->config.threads);
        *out = {r.threshold, r.n_all, r.n_short, r.n_long, r.correct_all, r.correct_short, r.correct_long};
    });
}

aose_status aose_eval_report_json(const aose_eval_report* report, char** out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        *out = export_string(to_cpp(*report).to_json());
    });
}

aose_status aose_eval_report_table(const aose_eval_report* report, char** out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        *out = export_string(to_cpp(*report).to_table());
    });
}

aose_status aose_dataset_stats_compute(const char* dataset_jsonl, size_t len, size_t threshold,
                                       aose_token_count_fn counter, void* user, aose_dataset_stats* out) {
    return guarded([&] {
        require(out, "out");
        std::istringstream in{std::string(view(dataset_jsonl, len))};
        const auto docs = aose::read_dataset(in);
        const CallbackCounter callback(counter, user);
        const aose::TokenCounter& chosen =
            counter != nullptr ? static_cast<const aose::TokenCounter&>(callback) : aose::default_token_counter();
        const auto s = aose::dataset_stats(docs, chosen, threshold);
        *out = {s.doc_count, s.long_doc_count, s.max_tokens, s.label_count, s.threshold,
                s.mean_tokens.has_value() ? 1 : 0, s.mean_tokens.value_or(0.0)};
    });
}

aose_status aose_dataset_stats_json(const aose_dataset_stats* stats, char** out) {
    return guarded([&] {
        require(stats, "stats");
        require(out, "out");
        *out = export_string(to_cpp(*stats).to_json());
    });
}

aose_status aose_dataset_stats_table(const aose_dataset_stats* stats, char** out) {
    return guarded([&] {
        require(stats, "stats");
        require(out, "out");
        *out = export_string(to_cpp(*stats).to_table());
    });
}

aose_status aose_costs(const aose_cost_query* query, aose_cost_report* out) {
    return guarded([&] {
        require(query, "query");
        require(out, "out");
        const auto r = aose::costs({query->t, query->l, query->g, query->w, query->c});
        *out = {r.roberta, r.smith, r.longformer, r.xlnet, r.aose};
    });
}

aose_status aose_cost_csv(const aose_cost_query* queries, size_t count, char** out) {
    return guarded([&] {
        require(out, "out");
        if (count == 0) throw aose::Error(aose::ErrorCode::InvalidArgument, "no cost queries");
        require(queries, "queries");
        std::vector<aose::CostQuery> qs;
        qs.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            qs.push_back({queries[i].t, queries[i].l, queries[i].g, queries[i].w, queries[i].c});
        }
        *out = export_string(aose::sweep_csv(qs));
    });
}

aose_status aose_cost_sweep_csv(const char* spec, char** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = export_string(aose::sweep_csv(aose::parse_sweep(spec)));
    });
}

aose_status aose_count_head_params(uint64_t dimension, uint64_t label_count, aose_head_param_count* out) {
    return guarded([&] {
        require(out, "out");
        const auto c = aose::count_head_params(dimension, label_count);
        *out = {c.transform, c.bias, c.context, c.classifier, c.total};
    });
}

} // extern "C"
