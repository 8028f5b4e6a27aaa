#ifndef AOSE_EVAL_STATS_HPP
#define AOSE_EVAL_STATS_HPP

#include "aose/classifier_trainer.hpp"
#include "aose/embeddings.hpp"
#include "aose/segmenter.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace aose {

inline constexpr std::size_t kLongDocumentThreshold = 512;

struct EvalReport {
    std::size_t threshold = kLongDocumentThreshold;
    std::size_t n_all = 0;
    std::size_t n_short = 0; // total tokens <= threshold
    std::size_t n_long = 0;  // total tokens > threshold
    std::size_t correct_all = 0;
    std::size_t correct_short = 0;
    std::size_t correct_long = 0;

    // Absent when the stratum is empty.
    std::optional<double> acc_all() const;
    std::optional<double> acc_short() const;
    std::optional<double> acc_long() const;

    std::string to_json() const;
    std::string to_table() const;
};

EvalReport evaluate(const HeadModel& model, const EmbeddingCorpus& corpus,
                    std::size_t threshold = kLongDocumentThreshold, std::size_t threads = 1);

struct DatasetStats {
    std::size_t doc_count = 0;
    std::size_t long_doc_count = 0;
    std::optional<double> mean_tokens;
    std::size_t max_tokens = 0;
    std::size_t label_count = 0; // distinct labels
    std::size_t threshold = kLongDocumentThreshold;

    std::string to_json() const;
    std::string to_table() const;
};

// Token counts are taken on the HTML-stripped text.
DatasetStats dataset_stats(std::span<const RawDocument> docs,
                           const TokenCounter& counter = default_token_counter(),
                           std::size_t threshold = kLongDocumentThreshold);

} // namespace aose

#endif // AOSE_EVAL_STATS_HPP
