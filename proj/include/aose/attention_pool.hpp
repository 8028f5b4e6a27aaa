#ifndef AOSE_ATTENTION_POOL_HPP
#define AOSE_ATTENTION_POOL_HPP

#include "aose/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aose {

// Trainable parameters of the sentence attention head:
//   u_i   = tanh(transform * s_i + bias)
//   a_i   = softmax_i(u_i . context)
//   v     = sum_i a_i * s_i
struct AttentionHeadParams {
    Matrix transform; // d x d
    Vector bias;      // d
    Vector context;   // d

    std::size_t dimension() const noexcept { return bias.size(); }

    // Throws on inconsistent shapes or non-finite entries.
    void validate() const;

    // Xavier-uniform transform and context, zero bias.
    static AttentionHeadParams initialize(std::size_t dimension, Seed seed);
    static AttentionHeadParams zeros(std::size_t dimension);

    friend bool operator==(const AttentionHeadParams&, const AttentionHeadParams&) = default;
};

// Forward result; doubles as the cache consumed by pool_backward.
struct PoolResult {
    Vector document;            // v
    Vector weights;             // attention weights, sum to 1
    Vector scores;              // pre-softmax logits
    std::vector<Vector> hidden; // u_i per sentence
    // Hash of the (params, sentences) the result was computed from.
    std::uint64_t fingerprint = 0;
};

struct AttentionHeadGrads {
    Matrix transform;
    Vector bias;
    Vector context;
    // dL/ds_i per input sentence.
    std::vector<Vector> inputs;
};

// Linear in the number of sentences: no sentence-pair interactions.
PoolResult pool_forward(const AttentionHeadParams& params, std::span<const Vector> sentences);

// Gradients given dL/dv. Throws if `cache` was not produced by pool_forward
// on these exact params and sentences.
AttentionHeadGrads pool_backward(const AttentionHeadParams& params,
                                 std::span<const Vector> sentences, const PoolResult& cache,
                                 const Vector& grad_document);

struct HeadParamCount {
    std::uint64_t transform = 0;
    std::uint64_t bias = 0;
    std::uint64_t context = 0;
    std::uint64_t classifier = 0;
    std::uint64_t total = 0;
};

// Trainable parameters of the attention head plus a K-way linear classifier.
HeadParamCount count_head_params(std::uint64_t dimension, std::uint64_t label_count);

} // namespace aose

#endif // AOSE_ATTENTION_POOL_HPP
