#ifndef AOSE_CLASSIFIER_TRAINER_HPP
#define AOSE_CLASSIFIER_TRAINER_HPP

#include "aose/attention_pool.hpp"
#include "aose/embeddings.hpp"
#include "aose/numerics.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace aose {

struct ClassifierParams {
    Matrix weights; // K x d
    Vector bias;    // K

    std::size_t label_count() const noexcept { return bias.size(); }
    std::size_t dimension() const noexcept { return weights.cols(); }

    void validate() const;

    // Xavier-uniform weights, zero bias.
    static ClassifierParams initialize(std::size_t label_count, std::size_t dimension, Seed seed);

    friend bool operator==(const ClassifierParams&, const ClassifierParams&) = default;
};

// logits = weights * v + bias.
Vector classify(const ClassifierParams& params, const Vector& document);

// Argmax; ties go to the lowest class index.
std::size_t predict(const Vector& logits);

struct CrossEntropy {
    double loss = 0.0;
    Vector grad_logits; // softmax(logits) - one_hot(label)
};

CrossEntropy cross_entropy(const Vector& logits, std::size_t label);

// Everything the frozen-mode trainer updates. Also used as the gradient
// container, with identical shapes.
struct HeadModel {
    AttentionHeadParams attention;
    ClassifierParams classifier;

    std::size_t dimension() const noexcept { return attention.dimension(); }
    std::size_t label_count() const noexcept { return classifier.label_count(); }

    void validate() const;

    static HeadModel initialize(std::size_t dimension, std::size_t label_count, Seed seed);
    static HeadModel zeros_like(const HeadModel& model);

    static constexpr std::array<std::string_view, 5> tensor_names{
        "attention.transform", "attention.bias", "attention.context", "classifier.weights",
        "classifier.bias"};

    std::array<std::span<double>, 5> tensors();
    std::array<std::span<const double>, 5> tensors() const;

    friend bool operator==(const HeadModel&, const HeadModel&) = default;
};

struct DocumentGrads {
    double loss = 0.0;
    std::size_t predicted = 0;
    HeadModel grads;
    // dL/ds_i, exposed for attaching a trainable encoder upstream.
    std::vector<Vector> inputs;
};

// pool_forward -> classify -> cross_entropy, then the full backward pass.
DocumentGrads document_grads(const HeadModel& model, std::span<const Vector> sentences,
                             std::size_t label);

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::uint64_t step = 0;
    std::array<std::vector<double>, 5> first;
    std::array<std::vector<double>, 5> second;

    static AdamState for_model(const HeadModel& model);
};

// Bias-corrected Adam update in place. Throws Error(NonFinite) naming the
// offending tensor before touching anything.
void adam_step(HeadModel& params, const HeadModel& grads, AdamState& state, double learning_rate,
               const AdamConfig& cfg = {});

enum class TrainMode {
    Frozen,     // input gradients are discarded
    InputGrads, // input gradients are computed and their norm reported
};

std::string_view to_string(TrainMode mode);
TrainMode train_mode_from_string(std::string_view name);

struct TrainConfig {
    double learning_rate = 2e-5;
    std::size_t batch_size = 16;
    std::size_t accumulation_steps = 1;
    std::size_t epochs = 50;
    std::uint64_t seed = 42;
    TrainMode mode = TrainMode::Frozen;
    // Documents of a batch processed concurrently; results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double accuracy = 0.0;
    double seconds = 0.0;
    // Mean L2 norm of dL/ds_i over all sentences seen; InputGrads mode only.
    double mean_input_grad_norm = 0.0;
};

struct TrainResult {
    HeadModel model;
    std::vector<EpochMetrics> epochs;
};

// Per epoch: shuffle with (seed, epoch), run micro-batches of batch_size and
// apply one Adam step per accumulation_steps micro-batches using the mean
// gradient over every document accumulated. Throws on an empty corpus, fewer
// than two labels or inconsistent dimensions.
TrainResult train(const EmbeddingCorpus& corpus, const TrainConfig& cfg);

// Same as train() but starting from the given parameters.
TrainResult train_from(HeadModel initial, const EmbeddingCorpus& corpus, const TrainConfig& cfg);

// Document order used for a given epoch.
std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed, std::size_t epoch);

struct Checkpoint {
    HeadModel model;
    TrainConfig config;
};

void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(std::istream& in);

} // namespace aose

#endif // AOSE_CLASSIFIER_TRAINER_HPP
