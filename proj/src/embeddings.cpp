#include "aose/embeddings.hpp"

#include "aose/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace aose {

namespace {

constexpr double kSilentRenormTolerance = 1e-12;
constexpr double kWarnRenormTolerance = 1e-6;

[[noreturn]] void fail(ErrorCode code, std::size_t line_no, const std::string& what) {
    throw Error(code, "line " + std::to_string(line_no) + ": " + what);
}

std::size_t unsigned_field(const nlohmann::json& j, const char* name, std::size_t line_no) {
    const auto it = j.find(name);
    if (it == j.end()) fail(ErrorCode::Parse, line_no, std::string("missing field '") + name + "'");
    if (!it->is_number_unsigned()) {
        fail(ErrorCode::Parse, line_no, std::string("field '") + name + "' must be a non-negative integer");
    }
    return it->get<std::size_t>();
}

} // namespace

void EmbeddingCorpus::validate() const {
    if (dimension == 0) throw Error(ErrorCode::InvalidArgument, "corpus dimension must be positive");
    for (const auto& doc : documents) {
        if (doc.sentences.empty()) {
            throw Error(ErrorCode::InvalidArgument, "document '" + doc.doc_id + "' has no sentences");
        }
        if (doc.label >= label_count) {
            throw Error(ErrorCode::InvalidArgument,
                        "document '" + doc.doc_id + "' label " + std::to_string(doc.label) +
                            " outside [0, " + std::to_string(label_count) + ")");
        }
        if (doc.total_token_count == 0) {
            throw Error(ErrorCode::InvalidArgument,
                        "document '" + doc.doc_id + "' has a zero token count");
        }
        for (const auto& s : doc.sentences) {
            if (s.size() != dimension) {
                throw Error(ErrorCode::ShapeMismatch,
                            "document '" + doc.doc_id + "' has a vector of length " +
                                std::to_string(s.size()) + ", corpus dimension is " +
                                std::to_string(dimension));
            }
        }
    }
}

Vector toy_encode(std::string_view text, std::size_t dimension, Seed seed) {
    if (dimension < 2) {
        throw Error(ErrorCode::InvalidArgument, "toy encoder dimension must be at least 2");
    }
    const std::uint64_t text_hash = fnv1a(std::as_bytes(std::span(text.data(), text.size())));
    SplitMix64 rng(text_hash ^ mix64(seed.value));
    Vector v(dimension);
    for (double& x : v) x = rng.normal();
    return l2_normalize(v);
}

EmbeddingCorpus encode_sentences(const std::vector<SentenceRecord>& records,
                                 std::size_t dimension, Seed seed,
                                 std::optional<std::size_t> label_count) {
    EmbeddingCorpus corpus;
    corpus.dimension = dimension;
    std::size_t max_label = 0;
    std::size_t summed_tokens = 0;
    for (const auto& r : records) {
        const bool new_doc = corpus.documents.empty() || corpus.documents.back().doc_id != r.doc_id;
        if (new_doc) {
            if (!corpus.documents.empty() && corpus.documents.back().total_token_count == 0) {
                corpus.documents.back().total_token_count = summed_tokens;
            }
            EmbeddedDocument doc;
            doc.doc_id = r.doc_id;
            doc.label = static_cast<std::size_t>(r.label);
            doc.total_token_count = r.doc_token_count;
            corpus.documents.push_back(std::move(doc));
            summed_tokens = 0;
        } else if (corpus.documents.back().label != r.label) {
            throw Error(ErrorCode::InvalidArgument,
                        "document '" + r.doc_id + "' has sentences with different labels");
        }
        corpus.documents.back().sentences.push_back(toy_encode(r.text, dimension, seed));
        summed_tokens += r.token_count;
        max_label = std::max<std::size_t>(max_label, r.label);
    }
    if (!corpus.documents.empty() && corpus.documents.back().total_token_count == 0) {
        corpus.documents.back().total_token_count = summed_tokens;
    }
    corpus.label_count = label_count.value_or(corpus.documents.empty() ? 0 : max_label + 1);
    corpus.validate();
    return corpus;
}

void write_corpus(std::ostream& out, const EmbeddingCorpus& corpus) {
    nlohmann::ordered_json header;
    header["dimension"] = corpus.dimension;
    header["label_count"] = corpus.label_count;
    out << header.dump() << '\n';
    for (const auto& doc : corpus.documents) {
        nlohmann::ordered_json j;
        j["id"] = doc.doc_id;
        j["label"] = doc.label;
        j["token_count"] = doc.total_token_count;
        auto vectors = nlohmann::ordered_json::array();
        for (const auto& s : doc.sentences) vectors.push_back(s.values());
        j["vectors"] = std::move(vectors);
        out << j.dump() << '\n';
    }
}

CorpusLoad read_corpus(std::istream& in) {
    CorpusLoad load;
    EmbeddingCorpus& corpus = load.corpus;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorCode::Parse, line_no, e.what());
        }
        if (!j.is_object()) fail(ErrorCode::Parse, line_no, "expected a JSON object");

        if (!have_header) {
            corpus.dimension = unsigned_field(j, "dimension", line_no);
            corpus.label_count = unsigned_field(j, "label_count", line_no);
            if (corpus.dimension == 0) fail(ErrorCode::Parse, line_no, "dimension must be positive");
            have_header = true;
            continue;
        }

        EmbeddedDocument doc;
        const auto id = j.find("id");
        if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
            fail(ErrorCode::Parse, line_no, "field 'id' must be a non-empty string");
        }
        doc.doc_id = id->get<std::string>();
        doc.label = unsigned_field(j, "label", line_no);
        doc.total_token_count = unsigned_field(j, "token_count", line_no);
        if (doc.label >= corpus.label_count) {
            fail(ErrorCode::InvalidArgument, line_no,
                 "label " + std::to_string(doc.label) + " outside [0, " +
                     std::to_string(corpus.label_count) + ")");
        }
        if (doc.total_token_count == 0) fail(ErrorCode::Parse, line_no, "token_count must be positive");

        const auto vectors = j.find("vectors");
        if (vectors == j.end() || !vectors->is_array() || vectors->empty()) {
            fail(ErrorCode::Parse, line_no, "field 'vectors' must be a non-empty array");
        }
        for (const auto& jv : *vectors) {
            if (!jv.is_array()) fail(ErrorCode::Parse, line_no, "each vector must be an array");
            if (jv.size() != corpus.dimension) {
                fail(ErrorCode::ShapeMismatch, line_no,
                     "vector of length " + std::to_string(jv.size()) + ", expected " +
                         std::to_string(corpus.dimension));
            }
            std::vector<double> values;
            values.reserve(jv.size());
            for (const auto& x : jv) {
                if (!x.is_number()) fail(ErrorCode::Parse, line_no, "vector entries must be numbers");
                values.push_back(x.get<double>());
            }
            if (!all_finite(values)) fail(ErrorCode::NonFinite, line_no, "non-finite vector entry");
            Vector v(std::move(values));
            const double norm = l2_norm(v.span());
            if (!(norm > 0.0)) fail(ErrorCode::InvalidArgument, line_no, "zero sentence vector");
            const double off = std::abs(norm - 1.0);
            if (off > kSilentRenormTolerance) {
                v = l2_normalize(v);
                if (off > kWarnRenormTolerance) ++load.renormalized;
            }
            doc.sentences.push_back(std::move(v));
        }
        corpus.documents.push_back(std::move(doc));
    }
    if (!have_header) throw Error(ErrorCode::Parse, "embedding file has no header line");
    return load;
}

} // namespace aose
