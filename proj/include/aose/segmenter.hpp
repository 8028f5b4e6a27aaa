#ifndef AOSE_SEGMENTER_HPP
#define AOSE_SEGMENTER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aose {

// Byte range [begin, end) of one token inside the text handed to a counter.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Pluggable tokenizer used for every token-count decision in the pipeline.
// Implementations must be deterministic, return spans in increasing order,
// and tokenize a substring cut at token boundaries into the same tokens.
class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;
    virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }
};

// Whitespace split, then leading/trailing ASCII punctuation split off one
// character per token. Word-internal punctuation ("one-two", "3.14") stays.
class WhitespacePunctCounter final : public TokenCounter {
public:
    std::vector<TokenSpan> tokenize(std::string_view text) const override;
    std::size_t count(std::string_view text) const override;
};

const TokenCounter& default_token_counter();

std::size_t count_tokens(std::string_view text);

// Removes `<tag ...>` markup and decodes &amp; &lt; &gt; &quot; &apos; &#NN;
// &#xHH;. A '<' that does not open a tag, or is never closed, is kept.
// Repeats until nothing changes, so strip_html(strip_html(x)) == strip_html(x);
// doubly escaped text ("&amp;lt;") is therefore decoded twice.
std::string strip_html(std::string_view text);

struct RawDocument {
    std::string doc_id;
    std::string text;
    std::uint64_t label = 0;
};

struct SegmentConfig {
    std::size_t min_tokens = 5;
    std::size_t max_tokens = 250;
    std::size_t doc_token_cap = 8192;
    std::string separators = ".!?\n";

    // Throws unless 1 <= min_tokens < max_tokens <= doc_token_cap and the
    // separator set is non-empty.
    void validate() const;
};

struct Sentence {
    std::string text;
    std::size_t token_count = 0;
    std::size_t index = 0;
    // Byte offsets into SegmentedDocument::cleaned_text.
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct SegmentedDocument {
    std::vector<Sentence> sentences;
    std::string cleaned_text;
    // Token count of the whole cleaned document, before the cap is applied.
    std::size_t total_tokens = 0;
    // True when the document was shorter than min_tokens and emitted whole.
    bool degenerate = false;
};

SegmentedDocument segment(const RawDocument& doc, const SegmentConfig& cfg,
                          const TokenCounter& counter = default_token_counter());

// Dataset JSONL: {"id": str, "text": str, "label": int} per line. Blank lines
// are skipped. Throws Error(Parse) naming the 1-based line number.
std::vector<RawDocument> read_dataset(std::istream& in);

// One sentence per line:
// {"id","index","text","token_count","label","doc_token_count"}.
void write_sentences(std::ostream& out, const RawDocument& doc, const SegmentedDocument& seg);

struct SentenceRecord {
    std::string doc_id;
    std::size_t index = 0;
    std::string text;
    std::size_t token_count = 0;
    std::uint64_t label = 0;
    // Absent in files from other producers; 0 means "unknown".
    std::size_t doc_token_count = 0;
};

std::vector<SentenceRecord> read_sentences(std::istream& in);

} // namespace aose

#endif // AOSE_SEGMENTER_HPP
