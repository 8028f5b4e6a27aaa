#include "aose/eval_stats.hpp"

#include "aose/error.hpp"
#include "parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <vector>

namespace aose {

namespace {

std::optional<double> ratio(std::size_t correct, std::size_t n) {
    if (n == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(n);
}

std::string fixed4(std::optional<double> x) {
    if (!x) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *x);
    return buf;
}

nlohmann::ordered_json rounded(std::optional<double> x) {
    if (!x) return nullptr;
    return std::stod(fixed4(x));
}

} // namespace

std::optional<double> EvalReport::acc_all() const { return ratio(correct_all, n_all); }
std::optional<double> EvalReport::acc_short() const { return ratio(correct_short, n_short); }
std::optional<double> EvalReport::acc_long() const { return ratio(correct_long, n_long); }

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["threshold"] = threshold;
    j["acc_all"] = rounded(acc_all());
    j["acc_short"] = rounded(acc_short());
    j["acc_long"] = rounded(acc_long());
    j["n_all"] = n_all;
    j["n_short"] = n_short;
    j["n_long"] = n_long;
    j["correct_all"] = correct_all;
    j["correct_short"] = correct_short;
    j["correct_long"] = correct_long;
    return j.dump();
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    char line[128];
    const std::string short_label = "<=" + std::to_string(threshold);
    const std::string long_label = ">" + std::to_string(threshold);
    std::snprintf(line, sizeof line, "%-10s %8s %8s %8s\n", "stratum", "acc", "correct", "n");
    out << line;
    const auto row = [&](const std::string& name, std::optional<double> acc, std::size_t c,
                         std::size_t n) {
        std::snprintf(line, sizeof line, "%-10s %8s %8zu %8zu\n", name.c_str(), fixed4(acc).c_str(),
                      c, n);
        out << line;
    };
    row("all", acc_all(), correct_all, n_all);
    row(short_label, acc_short(), correct_short, n_short);
    row(long_label, acc_long(), correct_long, n_long);
    return out.str();
}

EvalReport evaluate(const HeadModel& model, const EmbeddingCorpus& corpus, std::size_t threshold,
                    std::size_t threads) {
    model.validate();
    corpus.validate();
    if (model.dimension() != corpus.dimension) {
        throw Error(ErrorCode::ShapeMismatch,
                    "model dimension " + std::to_string(model.dimension()) +
                        " does not match corpus dimension " + std::to_string(corpus.dimension));
    }
    if (corpus.label_count > model.label_count()) {
        throw Error(ErrorCode::ShapeMismatch, "corpus has more labels than the model");
    }
    const std::size_t n = corpus.documents.size();
    std::vector<char> hit(n, 0);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        const auto& doc = corpus.documents[i];
        const PoolResult pooled = pool_forward(model.attention, doc.sentences);
        hit[i] = predict(classify(model.classifier, pooled.document)) == doc.label;
    });

    EvalReport r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_long = corpus.documents[i].total_token_count > threshold;
        ++r.n_all;
        r.correct_all += hit[i];
        if (is_long) {
            ++r.n_long;
            r.correct_long += hit[i];
        } else {
            ++r.n_short;
            r.correct_short += hit[i];
        }
    }
    return r;
}

std::string DatasetStats::to_json() const {
    nlohmann::ordered_json j;
    j["doc_count"] = doc_count;
    j["long_doc_count"] = long_doc_count;
    j["threshold"] = threshold;
    j["mean_tokens"] = mean_tokens ? nlohmann::ordered_json(*mean_tokens) : nlohmann::ordered_json(nullptr);
    j["max_tokens"] = max_tokens;
    j["label_count"] = label_count;
    return j.dump();
}

std::string DatasetStats::to_table() const {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-16s %zu\n", "documents", doc_count);
    out << line;
    std::snprintf(line, sizeof line, "%-16s %zu\n", ("> " + std::to_string(threshold)).c_str(),
                  long_doc_count);
    out << line;
    if (mean_tokens) {
        std::snprintf(line, sizeof line, "%-16s %.2f\n", "mean tokens", *mean_tokens);
    } else {
        std::snprintf(line, sizeof line, "%-16s %s\n", "mean tokens", "-");
    }
    out << line;
    std::snprintf(line, sizeof line, "%-16s %zu\n", "max tokens", max_tokens);
    out << line;
    std::snprintf(line, sizeof line, "%-16s %zu\n", "labels", label_count);
    out << line;
    return out.str();
}

DatasetStats dataset_stats(std::span<const RawDocument> docs, const TokenCounter& counter,
                           std::size_t threshold) {
    DatasetStats s;
    s.threshold = threshold;
    std::set<std::uint64_t> labels;
    std::size_t total = 0;
    for (const auto& doc : docs) {
        const std::size_t tokens = counter.count(strip_html(doc.text));
        ++s.doc_count;
        if (tokens > threshold) ++s.long_doc_count;
        total += tokens;
        s.max_tokens = std::max(s.max_tokens, tokens);
        labels.insert(doc.label);
    }
    if (s.doc_count > 0) s.mean_tokens = static_cast<double>(total) / static_cast<double>(s.doc_count);
    s.label_count = labels.size();
    return s;
}

} // namespace aose
