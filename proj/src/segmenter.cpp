#include "aose/segmenter.hpp"

#include "aose/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>

namespace aose {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
           (u >= 123 && u <= 126);
}

bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the entity body between '&' and ';'. Returns false when unknown.
bool decode_entity(std::string_view body, std::string& out) {
    struct Named {
        std::string_view name;
        char value;
    };
    static constexpr std::array<Named, 5> named{{
        {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''}}};
    for (const auto& n : named) {
        if (body == n.name) {
            out.push_back(n.value);
            return true;
        }
    }
    if (body.size() < 2 || body[0] != '#') return false;
    int base = 10;
    std::string_view digits = body.substr(1);
    if (digits[0] == 'x' || digits[0] == 'X') {
        base = 16;
        digits = digits.substr(1);
    }
    if (digits.empty()) return false;
    std::uint32_t cp = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return false;
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    append_utf8(out, cp);
    return true;
}

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t tokens = 0;
};

std::size_t count_span(const TokenCounter& counter, std::string_view text, std::size_t begin,
                       std::size_t end) {
    return counter.count(text.substr(begin, end - begin));
}

// Step 1: cut after every run of separator characters, trim whitespace and
// drop pieces without tokens.
std::vector<Span> split_at_separators(std::string_view text, std::string_view separators,
                                      const TokenCounter& counter) {
    std::vector<Span> pieces;
    const auto is_sep = [&](char c) { return separators.find(c) != std::string_view::npos; };
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(text[begin])) ++begin;
        while (end > begin && is_space(text[end - 1])) --end;
        if (begin == end) return;
        const std::size_t n = count_span(counter, text, begin, end);
        if (n > 0) pieces.push_back({begin, end, n});
    };
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_sep(text[i])) {
            while (i < text.size() && is_sep(text[i])) ++i;
            emit(start, i);
            start = i;
        } else {
            ++i;
        }
    }
    emit(start, text.size());
    return pieces;
}

// Step 2: merge short pieces forward; a short trailing piece joins the
// previous one. Returns empty when the whole document is below min_tokens.
std::vector<Span> merge_short(const std::vector<Span>& pieces, std::size_t min_tokens,
                              std::string_view text, const TokenCounter& counter) {
    std::vector<Span> merged;
    bool pending = false;
    Span acc;
    for (const Span& p : pieces) {
        if (pending) {
            acc.end = p.end;
            acc.tokens = count_span(counter, text, acc.begin, acc.end);
        } else {
            acc = p;
            pending = true;
        }
        if (acc.tokens >= min_tokens) {
            merged.push_back(acc);
            pending = false;
        }
    }
    if (pending && !merged.empty()) {
        Span& last = merged.back();
        last.end = acc.end;
        last.tokens = count_span(counter, text, last.begin, last.end);
    }
    // Joined text can count fewer tokens than its parts ("U." + "S").
    while (merged.size() > 1 && merged.back().tokens < min_tokens) {
        const std::size_t end = merged.back().end;
        merged.pop_back();
        Span& last = merged.back();
        last.end = end;
        last.tokens = count_span(counter, text, last.begin, last.end);
    }
    if (merged.size() == 1 && merged.back().tokens < min_tokens) merged.clear();
    return merged;
}

// Step 3: hard-split pieces longer than max_tokens into max_tokens chunks. A
// remainder below min_tokens borrows from the preceding chunk when both can
// stay within bounds, otherwise it is appended to it.
void split_long(const Span& piece, const SegmentConfig& cfg, std::string_view text,
                const TokenCounter& counter, std::vector<Span>& out) {
    if (piece.tokens <= cfg.max_tokens) {
        out.push_back(piece);
        return;
    }
    const std::vector<TokenSpan> toks =
        counter.tokenize(text.substr(piece.begin, piece.end - piece.begin));
    const std::size_t n = toks.size();
    if (n <= cfg.max_tokens) {
        out.push_back(piece);
        return;
    }
    std::vector<std::size_t> sizes(n / cfg.max_tokens, cfg.max_tokens);
    const std::size_t rest = n % cfg.max_tokens;
    if (rest > 0) {
        if (rest >= cfg.min_tokens) {
            sizes.push_back(rest);
        } else if (cfg.max_tokens + rest >= 2 * cfg.min_tokens) {
            sizes.back() = cfg.max_tokens + rest - cfg.min_tokens;
            sizes.push_back(cfg.min_tokens);
        } else {
            sizes.back() += rest;
        }
    }
    std::size_t first = 0;
    for (std::size_t size : sizes) {
        const std::size_t last = first + size - 1;
        out.push_back({piece.begin + toks[first].begin, piece.begin + toks[last].end, size});
        first += size;
    }
}

} // namespace

std::vector<TokenSpan> WhitespacePunctCounter::tokenize(std::string_view text) const {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        std::size_t word_end = i;
        while (word_end < text.size() && !is_space(text[word_end])) ++word_end;

        std::size_t core_begin = i;
        while (core_begin < word_end && is_punct(text[core_begin])) {
            spans.push_back({core_begin, core_begin + 1});
            ++core_begin;
        }
        std::size_t core_end = word_end;
        while (core_end > core_begin && is_punct(text[core_end - 1])) --core_end;
        if (core_end > core_begin) spans.push_back({core_begin, core_end});
        for (std::size_t p = core_end; p < word_end; ++p) {
            spans.push_back({p, p + 1});
        }
        i = word_end;
    }
    return spans;
}

std::size_t WhitespacePunctCounter::count(std::string_view text) const {
    return tokenize(text).size();
}

const TokenCounter& default_token_counter() {
    static const WhitespacePunctCounter counter;
    return counter;
}

std::size_t count_tokens(std::string_view text) {
    return default_token_counter().count(text);
}

namespace {

std::string strip_html_once(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '<' && i + 1 < text.size()) {
            const char next = text[i + 1];
            if (is_alpha(next) || next == '/' || next == '!' || next == '?') {
                const std::size_t close = text.find('>', i + 1);
                if (close != std::string_view::npos) {
                    i = close + 1;
                    continue;
                }
            }
        } else if (c == '&') {
            // Longest supported entity body is "#x10FFFF".
            const std::size_t semi = text.substr(i + 1, 9).find(';');
            if (semi != std::string_view::npos &&
                decode_entity(text.substr(i + 1, semi), out)) {
                i += semi + 2;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

} // namespace

std::string strip_html(std::string_view text) {
    std::string current = strip_html_once(text);
    while (true) {
        std::string next = strip_html_once(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

void SegmentConfig::validate() const {
    if (min_tokens < 1 || min_tokens >= max_tokens || max_tokens > doc_token_cap) {
        throw Error(ErrorCode::InvalidArgument,
                    "segment config requires 1 <= min_tokens < max_tokens <= doc_token_cap (got " +
                        std::to_string(min_tokens) + ", " + std::to_string(max_tokens) + ", " +
                        std::to_string(doc_token_cap) + ")");
    }
    if (separators.empty()) {
        throw Error(ErrorCode::InvalidArgument, "segment config needs at least one separator");
    }
}

SegmentedDocument segment(const RawDocument& doc, const SegmentConfig& cfg,
                          const TokenCounter& counter) {
    cfg.validate();
    SegmentedDocument result;
    result.cleaned_text = strip_html(doc.text);
    const std::string_view text = result.cleaned_text;
    result.total_tokens = counter.count(text);
    if (result.total_tokens == 0) {
        throw Error(ErrorCode::InvalidArgument, "document '" + doc.doc_id + "' has no text");
    }

    const std::vector<Span> merged =
        merge_short(split_at_separators(text, cfg.separators, counter), cfg.min_tokens, text,
                    counter);

    std::vector<Span> pieces;
    if (merged.empty()) {
        std::size_t begin = 0;
        std::size_t end = text.size();
        while (begin < end && is_space(text[begin])) ++begin;
        while (end > begin && is_space(text[end - 1])) --end;
        pieces.push_back({begin, end, count_span(counter, text, begin, end)});
        result.degenerate = true;
    } else {
        for (const Span& p : merged) split_long(p, cfg, text, counter, pieces);
    }

    std::size_t used = 0;
    for (const Span& p : pieces) {
        if (used + p.tokens > cfg.doc_token_cap) break;
        used += p.tokens;
        Sentence s;
        s.text = std::string(text.substr(p.begin, p.end - p.begin));
        s.token_count = p.tokens;
        s.index = result.sentences.size();
        s.begin = p.begin;
        s.end = p.end;
        result.sentences.push_back(std::move(s));
    }
    return result;
}

namespace {

nlohmann::json parse_line(const std::string& line, std::size_t line_no) {
    try {
        auto j = nlohmann::json::parse(line);
        if (!j.is_object()) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected a JSON object");
        }
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
}

template <class T>
T field(const nlohmann::json& j, const char* name, std::size_t line_no) {
    const auto it = j.find(name);
    if (it == j.end()) {
        throw Error(ErrorCode::Parse,
                    "line " + std::to_string(line_no) + ": missing field '" + name + "'");
    }
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw Error(ErrorCode::Parse, "");
        } else {
            if (!it->is_number_unsigned()) throw Error(ErrorCode::Parse, "");
        }
        return it->get<T>();
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": field '" + name +
                                          "' has the wrong type");
    }
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), is_space);
}

} // namespace

std::vector<RawDocument> read_dataset(std::istream& in) {
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto j = parse_line(line, line_no);
        RawDocument doc;
        doc.doc_id = field<std::string>(j, "id", line_no);
        doc.text = field<std::string>(j, "text", line_no);
        doc.label = field<std::uint64_t>(j, "label", line_no);
        if (doc.doc_id.empty()) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": empty document id");
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_sentences(std::ostream& out, const RawDocument& doc, const SegmentedDocument& seg) {
    for (const Sentence& s : seg.sentences) {
        nlohmann::ordered_json j;
        j["id"] = doc.doc_id;
        j["index"] = s.index;
        j["text"] = s.text;
        j["token_count"] = s.token_count;
        j["label"] = doc.label;
        j["doc_token_count"] = seg.total_tokens;
        out << j.dump() << '\n';
    }
}

std::vector<SentenceRecord> read_sentences(std::istream& in) {
    std::vector<SentenceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto j = parse_line(line, line_no);
        SentenceRecord r;
        r.doc_id = field<std::string>(j, "id", line_no);
        r.index = field<std::size_t>(j, "index", line_no);
        r.text = field<std::string>(j, "text", line_no);
        r.token_count = field<std::size_t>(j, "token_count", line_no);
        r.label = field<std::uint64_t>(j, "label", line_no);
        if (j.contains("doc_token_count")) {
            r.doc_token_count = field<std::size_t>(j, "doc_token_count", line_no);
        }
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace aose
