#include "aose/cost_model.hpp"

#include "aose/error.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <sstream>

namespace aose {

namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::InvalidArgument, "cost overflows 64 bits");
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::InvalidArgument, "cost overflows 64 bits");
    return r;
}

std::uint64_t parse_u64(std::string_view s, std::string_view spec) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "bad number '" + std::string(s) + "' in sweep '" + std::string(spec) + "'");
    }
    return v;
}

} // namespace

void CostQuery::validate() const {
    if (t == 0 || l == 0 || g == 0 || w == 0 || c == 0) {
        throw Error(ErrorCode::InvalidArgument, "cost query fields must be positive");
    }
    if (g > mul(t, l)) {
        throw Error(ErrorCode::InvalidArgument,
                    "global tokens g=" + std::to_string(g) + " exceed t*l=" + std::to_string(t * l));
    }
}

CostReport costs(const CostQuery& q) {
    q.validate();
    const std::uint64_t n = mul(q.t, q.l);
    CostReport r;
    r.roberta = mul(n, n);
    r.smith = add(mul(n, q.l), mul(q.t, q.t));
    r.longformer = add(mul(q.g, n), mul(n - q.g, q.w));
    r.xlnet = mul(n, q.c);
    r.aose = add(mul(n, q.l), q.t);
    return r;
}

void write_sweep_csv(std::ostream& out, std::span<const CostQuery> queries) {
    out << kCostCsvHeader << '\n';
    for (const auto& q : queries) {
        const CostReport r = costs(q);
        out << q.t << ',' << q.l << ',' << q.g << ',' << q.w << ',' << q.c << ',' << r.roberta << ','
            << r.smith << ',' << r.longformer << ',' << r.xlnet << ',' << r.aose << '\n';
    }
}

std::string sweep_csv(std::span<const CostQuery> queries) {
    std::ostringstream out;
    write_sweep_csv(out, queries);
    return out.str();
}

std::vector<CostQuery> parse_sweep(std::string_view spec) {
    struct Range {
        std::uint64_t first = 1, last = 1, step = 1;
    };
    std::array<Range, 5> ranges; // t, l, g, w, c
    constexpr std::string_view names = "tlgwc";
    std::array<bool, 5> seen{};

    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string_view item =
            spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        pos = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
        if (item.empty()) continue;

        const std::size_t eq = item.find('=');
        if (eq != 1 || names.find(item[0]) == std::string_view::npos) {
            throw Error(ErrorCode::InvalidArgument, "bad sweep item '" + std::string(item) +
                                                        "', expected <t|l|g|w|c>=value");
        }
        const std::size_t field = names.find(item[0]);
        if (seen[field]) {
            throw Error(ErrorCode::InvalidArgument, "sweep field '" + std::string(1, item[0]) + "' given twice");
        }
        seen[field] = true;

        std::string_view value = item.substr(2);
        Range r;
        const std::size_t c1 = value.find(':');
        if (c1 == std::string_view::npos) {
            r.first = r.last = parse_u64(value, spec);
        } else {
            r.first = parse_u64(value.substr(0, c1), spec);
            const std::string_view rest = value.substr(c1 + 1);
            const std::size_t c2 = rest.find(':');
            r.last = parse_u64(rest.substr(0, c2), spec);
            if (c2 != std::string_view::npos) r.step = parse_u64(rest.substr(c2 + 1), spec);
        }
        if (r.step == 0 || r.first == 0 || r.first > r.last) {
            throw Error(ErrorCode::InvalidArgument, "bad range in sweep item '" + std::string(item) + "'");
        }
        ranges[field] = r;
    }

    std::vector<CostQuery> queries;
    for (std::uint64_t t = ranges[0].first; t <= ranges[0].last; t += ranges[0].step)
        for (std::uint64_t l = ranges[1].first; l <= ranges[1].last; l += ranges[1].step)
            for (std::uint64_t g = ranges[2].first; g <= ranges[2].last; g += ranges[2].step)
                for (std::uint64_t w = ranges[3].first; w <= ranges[3].last; w += ranges[3].step)
                    for (std::uint64_t c = ranges[4].first; c <= ranges[4].last; c += ranges[4].step) {
                        CostQuery q{t, l, g, w, c};
                        q.validate();
                        queries.push_back(q);
                    }
    if (queries.empty()) throw Error(ErrorCode::InvalidArgument, "sweep produced no queries");
    return queries;
}

} // namespace aose
