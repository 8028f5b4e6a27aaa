#ifndef AOSE_EMBEDDINGS_HPP
#define AOSE_EMBEDDINGS_HPP

#include "aose/numerics.hpp"
#include "aose/segmenter.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aose {

struct EmbeddedDocument {
    std::string doc_id;
    std::size_t label = 0;
    // Document length before truncation; drives length stratification.
    std::size_t total_token_count = 0;
    // Unit-norm sentence vectors, in sentence order.
    std::vector<Vector> sentences;

    friend bool operator==(const EmbeddedDocument&, const EmbeddedDocument&) = default;
};

struct EmbeddingCorpus {
    std::size_t dimension = 0;
    std::size_t label_count = 0;
    std::vector<EmbeddedDocument> documents;

    // Throws on an empty document, a vector of the wrong dimension, a label
    // outside [0, label_count) or a zero token count.
    void validate() const;

    friend bool operator==(const EmbeddingCorpus&, const EmbeddingCorpus&) = default;
};

// Deterministic stand-in for a sentence encoder: (text, seed) is hashed into
// a splitmix64 state, `dimension` standard normals are drawn and the result is
// L2-normalized. Requires dimension >= 2.
Vector toy_encode(std::string_view text, std::size_t dimension, Seed seed);

// Groups consecutive records by document id and encodes every sentence. The
// label count defaults to max(label) + 1.
EmbeddingCorpus encode_sentences(const std::vector<SentenceRecord>& records,
                                 std::size_t dimension, Seed seed,
                                 std::optional<std::size_t> label_count = std::nullopt);

// Header line {"dimension": d, "label_count": K}, then one line per document:
// {"id", "label", "token_count", "vectors": [[...], ...]}. Doubles are written
// in shortest round-trip form.
void write_corpus(std::ostream& out, const EmbeddingCorpus& corpus);

struct CorpusLoad {
    EmbeddingCorpus corpus;
    // Vectors whose norm was off by more than 1e-6 and were re-normalized.
    std::size_t renormalized = 0;
};

// Throws Error(Parse / ShapeMismatch / InvalidArgument) naming the 1-based
// line on malformed input, dimension mismatch or an out-of-range label.
CorpusLoad read_corpus(std::istream& in);

} // namespace aose

#endif // AOSE_EMBEDDINGS_HPP
