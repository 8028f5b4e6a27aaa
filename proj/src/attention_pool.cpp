#include "aose/attention_pool.hpp"

#include "aose/error.hpp"

#include <cmath>
#include <string>

namespace aose {

namespace {

std::uint64_t hash_doubles(std::span<const double> values, std::uint64_t basis) {
    return fnv1a(std::as_bytes(values), basis);
}

std::uint64_t fingerprint_of(const AttentionHeadParams& params,
                             std::span<const Vector> sentences) {
    std::uint64_t h = hash_doubles(params.transform.span(), 0xcbf29ce484222325ULL);
    h = hash_doubles(params.bias.span(), h);
    h = hash_doubles(params.context.span(), h);
    for (const auto& s : sentences) h = hash_doubles(s.span(), mix64(h));
    return mix64(h ^ sentences.size());
}

void check_inputs(const AttentionHeadParams& params, std::span<const Vector> sentences) {
    if (sentences.empty()) {
        throw Error(ErrorCode::InvalidArgument, "attention pooling needs at least one sentence");
    }
    const std::size_t d = params.dimension();
    if (params.transform.rows() != d || params.transform.cols() != d || params.context.size() != d) {
        throw Error(ErrorCode::ShapeMismatch, "attention head parameters have inconsistent shapes");
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].size() != d) {
            throw Error(ErrorCode::ShapeMismatch,
                        "sentence " + std::to_string(i) + " has dimension " +
                            std::to_string(sentences[i].size()) + ", head expects " +
                            std::to_string(d));
        }
    }
}

} // namespace

void AttentionHeadParams::validate() const {
    const std::size_t d = dimension();
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "attention head dimension must be positive");
    if (transform.rows() != d || transform.cols() != d || context.size() != d) {
        throw Error(ErrorCode::ShapeMismatch, "attention head parameters have inconsistent shapes");
    }
    if (!all_finite(transform.span()) || !all_finite(bias.span()) || !all_finite(context.span())) {
        throw Error(ErrorCode::NonFinite, "attention head parameters contain non-finite values");
    }
}

AttentionHeadParams AttentionHeadParams::initialize(std::size_t dimension, Seed seed) {
    AttentionHeadParams p;
    p.transform = init_params(dimension, dimension, Seed{mix64(seed.value ^ 0x01)});
    p.bias = Vector(dimension);
    const Matrix context = init_params(dimension, 1, Seed{mix64(seed.value ^ 0x02)});
    p.context = Vector(context.values());
    return p;
}

AttentionHeadParams AttentionHeadParams::zeros(std::size_t dimension) {
    return {Matrix(dimension, dimension), Vector(dimension), Vector(dimension)};
}

PoolResult pool_forward(const AttentionHeadParams& params, std::span<const Vector> sentences) {
    check_inputs(params, sentences);
    const std::size_t t = sentences.size();
    const std::size_t d = params.dimension();

    PoolResult r;
    r.hidden.reserve(t);
    r.scores = Vector(t);
    for (std::size_t i = 0; i < t; ++i) {
        Vector pre = matvec(params.transform, sentences[i]);
        for (std::size_t k = 0; k < d; ++k) pre[k] += params.bias[k];
        r.hidden.push_back(tanh_vec(pre));
        r.scores[i] = dot(r.hidden.back().span(), params.context.span());
    }
    r.weights = stable_softmax(r.scores);
    r.document = Vector(d);
    for (std::size_t i = 0; i < t; ++i) {
        const double a = r.weights[i];
        for (std::size_t k = 0; k < d; ++k) r.document[k] += a * sentences[i][k];
    }
    r.fingerprint = fingerprint_of(params, sentences);
    return r;
}

AttentionHeadGrads pool_backward(const AttentionHeadParams& params,
                                 std::span<const Vector> sentences, const PoolResult& cache,
                                 const Vector& grad_document) {
    check_inputs(params, sentences);
    const std::size_t t = sentences.size();
    const std::size_t d = params.dimension();
    if (grad_document.size() != d) {
        throw Error(ErrorCode::ShapeMismatch, "upstream gradient has dimension " +
                                                  std::to_string(grad_document.size()) +
                                                  ", head expects " + std::to_string(d));
    }
    if (cache.weights.size() != t || cache.hidden.size() != t ||
        cache.fingerprint != fingerprint_of(params, sentences)) {
        throw Error(ErrorCode::InvalidArgument,
                    "pool_backward: cache does not belong to these parameters and sentences");
    }

    AttentionHeadGrads g{Matrix(d, d), Vector(d), Vector(d), {}};
    g.inputs.reserve(t);

    // dL/da_i = g . s_i, pushed through the softmax Jacobian diag(a) - a a^T.
    Vector grad_weight(t);
    double mean = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        grad_weight[i] = dot(grad_document.span(), sentences[i].span());
        mean += cache.weights[i] * grad_weight[i];
    }

    for (std::size_t i = 0; i < t; ++i) {
        const double grad_score = cache.weights[i] * (grad_weight[i] - mean);
        const Vector& u = cache.hidden[i];
        const Vector& s = sentences[i];

        Vector grad_pre(d);
        for (std::size_t k = 0; k < d; ++k) {
            g.context[k] += grad_score * u[k];
            grad_pre[k] = grad_score * params.context[k] * (1.0 - u[k] * u[k]);
        }
        for (std::size_t r = 0; r < d; ++r) {
            const double gr = grad_pre[r];
            g.bias[r] += gr;
            if (gr == 0.0) continue;
            auto row = g.transform.row(r);
            for (std::size_t c = 0; c < d; ++c) row[c] += gr * s[c];
        }

        Vector grad_input = matvec_transposed(params.transform, grad_pre);
        for (std::size_t k = 0; k < d; ++k) grad_input[k] += cache.weights[i] * grad_document[k];
        g.inputs.push_back(std::move(grad_input));
    }
    return g;
}

HeadParamCount count_head_params(std::uint64_t dimension, std::uint64_t label_count) {
    if (dimension < 1 || label_count < 2) {
        throw Error(ErrorCode::InvalidArgument, "count_head_params requires d >= 1 and K >= 2");
    }
    HeadParamCount c;
    c.transform = dimension * dimension;
    c.bias = dimension;
    c.context = dimension;
    c.classifier = label_count * dimension + label_count;
    c.total = c.transform + c.bias + c.context + c.classifier;
    return c;
}

} // namespace aose
