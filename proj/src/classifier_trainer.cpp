#include "aose/classifier_trainer.hpp"

#include "aose/error.hpp"
#include "parallel.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace aose {

void ClassifierParams::validate() const {
    if (weights.rows() != bias.size() || weights.rows() == 0 || weights.cols() == 0) {
        throw Error(ErrorCode::ShapeMismatch, "classifier parameters have inconsistent shapes");
    }
    if (!all_finite(weights.span()) || !all_finite(bias.span())) {
        throw Error(ErrorCode::NonFinite, "classifier parameters contain non-finite values");
    }
}

ClassifierParams ClassifierParams::initialize(std::size_t label_count, std::size_t dimension,
                                              Seed seed) {
    return {init_params(label_count, dimension, seed), Vector(label_count)};
}

Vector classify(const ClassifierParams& params, const Vector& document) {
    if (document.size() != params.dimension()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "classifier expects dimension " + std::to_string(params.dimension()) +
                        ", document vector has " + std::to_string(document.size()));
    }
    Vector logits = matvec(params.weights, document);
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += params.bias[k];
    return logits;
}

std::size_t predict(const Vector& logits) {
    if (logits.empty()) throw Error(ErrorCode::InvalidArgument, "predict on empty logits");
    std::size_t best = 0;
    for (std::size_t k = 1; k < logits.size(); ++k) {
        if (logits[k] > logits[best]) best = k;
    }
    return best;
}

CrossEntropy cross_entropy(const Vector& logits, std::size_t label) {
    if (label >= logits.size()) {
        throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(label) +
                                                    " out of range for " +
                                                    std::to_string(logits.size()) + " classes");
    }
    CrossEntropy ce;
    ce.loss = log_sum_exp(logits) - logits[label];
    ce.grad_logits = stable_softmax(logits);
    ce.grad_logits[label] -= 1.0;
    return ce;
}

void HeadModel::validate() const {
    attention.validate();
    classifier.validate();
    if (classifier.dimension() != attention.dimension()) {
        throw Error(ErrorCode::ShapeMismatch, "classifier and attention head dimensions differ");
    }
}

HeadModel HeadModel::initialize(std::size_t dimension, std::size_t label_count, Seed seed) {
    const std::uint64_t base = mix64(seed.value);
    return {AttentionHeadParams::initialize(dimension, Seed{base}),
            ClassifierParams::initialize(label_count, dimension, Seed{mix64(base ^ 0x03)})};
}

HeadModel HeadModel::zeros_like(const HeadModel& model) {
    const std::size_t d = model.dimension();
    const std::size_t k = model.label_count();
    return {AttentionHeadParams::zeros(d), ClassifierParams{Matrix(k, d), Vector(k)}};
}

std::array<std::span<double>, 5> HeadModel::tensors() {
    return {attention.transform.span(), attention.bias.span(), attention.context.span(),
            classifier.weights.span(), classifier.bias.span()};
}

std::array<std::span<const double>, 5> HeadModel::tensors() const {
    return {attention.transform.span(), attention.bias.span(), attention.context.span(),
            classifier.weights.span(), classifier.bias.span()};
}

DocumentGrads document_grads(const HeadModel& model, std::span<const Vector> sentences,
                             std::size_t label) {
    const PoolResult pooled = pool_forward(model.attention, sentences);
    const Vector logits = classify(model.classifier, pooled.document);
    CrossEntropy ce = cross_entropy(logits, label);

    DocumentGrads out;
    out.loss = ce.loss;
    out.predicted = predict(logits);

    const std::size_t d = model.dimension();
    const std::size_t k = model.label_count();
    Matrix grad_weights(k, d);
    for (std::size_t r = 0; r < k; ++r) {
        auto row = grad_weights.row(r);
        for (std::size_t c = 0; c < d; ++c) row[c] = ce.grad_logits[r] * pooled.document[c];
    }
    const Vector grad_document = matvec_transposed(model.classifier.weights, ce.grad_logits);

    AttentionHeadGrads head = pool_backward(model.attention, sentences, pooled, grad_document);
    out.grads.attention = {std::move(head.transform), std::move(head.bias),
                           std::move(head.context)};
    out.grads.classifier = {std::move(grad_weights), std::move(ce.grad_logits)};
    out.inputs = std::move(head.inputs);
    return out;
}

AdamState AdamState::for_model(const HeadModel& model) {
    AdamState state;
    const auto tensors = model.tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        state.first[i].assign(tensors[i].size(), 0.0);
        state.second[i].assign(tensors[i].size(), 0.0);
    }
    return state;
}

void adam_step(HeadModel& params, const HeadModel& grads, AdamState& state, double learning_rate,
               const AdamConfig& cfg) {
    auto p = params.tensors();
    const auto g = grads.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].size() != g[i].size() || state.first[i].size() != p[i].size() ||
            state.second[i].size() != p[i].size()) {
            throw Error(ErrorCode::ShapeMismatch,
                        "adam_step: shape mismatch on " + std::string(HeadModel::tensor_names[i]));
        }
        if (!all_finite(g[i])) {
            throw Error(ErrorCode::NonFinite,
                        "adam_step: non-finite gradient in " + std::string(HeadModel::tensor_names[i]));
        }
    }
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(cfg.beta1, t);
    const double correct2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto& m = state.first[i];
        auto& v = state.second[i];
        for (std::size_t j = 0; j < p[i].size(); ++j) {
            const double gj = g[i][j];
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
            const double m_hat = m[j] / correct1;
            const double v_hat = v[j] / correct2;
            p[i][j] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
}

std::string_view to_string(TrainMode mode) {
    return mode == TrainMode::Frozen ? "frozen" : "input-grads";
}

TrainMode train_mode_from_string(std::string_view name) {
    if (name == "frozen") return TrainMode::Frozen;
    if (name == "input-grads") return TrainMode::InputGrads;
    throw Error(ErrorCode::InvalidArgument, "unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw Error(ErrorCode::InvalidArgument, "learning rate must be finite and non-negative");
    }
    if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be at least 1");
    if (accumulation_steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "accumulation steps must be at least 1");
    }
    if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be at least 1");
    if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
}

std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(mix64(seed) ^ mix64(0x5eed0000ULL + epoch));
    for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

namespace {

void add_into(HeadModel& acc, const HeadModel& g) {
    auto a = acc.tensors();
    const auto b = g.tensors();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
    }
}

void scale(HeadModel& m, double factor) {
    for (auto t : m.tensors()) {
        for (double& x : t) x *= factor;
    }
}

void zero(HeadModel& m) {
    for (auto t : m.tensors()) std::fill(t.begin(), t.end(), 0.0);
}

} // namespace

TrainResult train(const EmbeddingCorpus& corpus, const TrainConfig& cfg) {
    return train_from(HeadModel::initialize(corpus.dimension, corpus.label_count, Seed{cfg.seed}),
                      corpus, cfg);
}

TrainResult train_from(HeadModel initial, const EmbeddingCorpus& corpus, const TrainConfig& cfg) {
    cfg.validate();
    if (corpus.documents.empty()) throw Error(ErrorCode::InvalidArgument, "training corpus is empty");
    if (corpus.label_count < 2) {
        throw Error(ErrorCode::InvalidArgument, "training needs at least two labels");
    }
    corpus.validate();
    initial.validate();
    if (initial.dimension() != corpus.dimension || initial.label_count() != corpus.label_count) {
        throw Error(ErrorCode::ShapeMismatch, "model shape does not match the corpus");
    }

    TrainResult result{std::move(initial), {}};
    HeadModel& model = result.model;
    AdamState adam = AdamState::for_model(model);
    HeadModel accumulated = HeadModel::zeros_like(model);
    const std::size_t n = corpus.documents.size();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const std::vector<std::size_t> order = epoch_order(n, cfg.seed, epoch);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        double input_norm_sum = 0.0;
        std::size_t input_count = 0;

        std::size_t pending_docs = 0;
        std::size_t pending_batches = 0;
        std::vector<DocumentGrads> batch;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t size = std::min(cfg.batch_size, n - start);
            batch.assign(size, DocumentGrads{});
            detail::parallel_for(size, cfg.threads, [&](std::size_t i) {
                const auto& doc = corpus.documents[order[start + i]];
                batch[i] = document_grads(model, doc.sentences, doc.label);
            });
            // Fixed document order keeps the sum independent of thread count
            // and of how the effective batch is factored.
            for (std::size_t i = 0; i < size; ++i) {
                const DocumentGrads& g = batch[i];
                add_into(accumulated, g.grads);
                loss_sum += g.loss;
                if (g.predicted == corpus.documents[order[start + i]].label) ++correct;
                if (cfg.mode == TrainMode::InputGrads) {
                    for (const auto& s : g.inputs) input_norm_sum += l2_norm(s.span());
                    input_count += g.inputs.size();
                }
            }
            pending_docs += size;
            pending_batches += 1;
            if (pending_batches == cfg.accumulation_steps || start + size == n) {
                scale(accumulated, 1.0 / static_cast<double>(pending_docs));
                adam_step(model, accumulated, adam, cfg.learning_rate);
                zero(accumulated);
                pending_docs = 0;
                pending_batches = 0;
            }
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.mean_loss = loss_sum / static_cast<double>(n);
        m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        m.mean_input_grad_norm =
            input_count == 0 ? 0.0 : input_norm_sum / static_cast<double>(input_count);
        result.epochs.push_back(m);
    }
    return result;
}

} // namespace aose
