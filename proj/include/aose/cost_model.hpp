#ifndef AOSE_COST_MODEL_HPP
#define AOSE_COST_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aose {

// t sentences of l tokens, g global-attention tokens, local window w,
// recurrence segment length c.
struct CostQuery {
    std::uint64_t t = 1;
    std::uint64_t l = 1;
    std::uint64_t g = 1;
    std::uint64_t w = 1;
    std::uint64_t c = 1;

    // Throws unless all fields are positive and g <= t * l.
    void validate() const;
};

// Attention-weight counts in abstract units (unit constant factors):
//   full self-attention   t^2 l^2
//   two-level (SMITH)     t l^2 + t^2
//   global+local window   g t l + (t l - g) w
//   segment recurrence    t l c
//   sentence attention    t l^2 + t
struct CostReport {
    std::uint64_t roberta = 0;
    std::uint64_t smith = 0;
    std::uint64_t longformer = 0;
    std::uint64_t xlnet = 0;
    std::uint64_t aose = 0;

    friend bool operator==(const CostReport&, const CostReport&) = default;
};

// Throws Error(InvalidArgument) when a cost does not fit in 64 bits.
CostReport costs(const CostQuery& q);

inline constexpr std::string_view kCostCsvHeader = "t,l,g,w,c,roberta,smith,longformer,xlnet,aose";

// Header plus one row per query, in input order.
void write_sweep_csv(std::ostream& out, std::span<const CostQuery> queries);
std::string sweep_csv(std::span<const CostQuery> queries);

// Parses "t=1:100,l=20,g=2,w=4,c=512". Each field is a value or an inclusive
// range start:end[:step]; omitted fields default to 1. The cartesian product
// is emitted with t varying slowest and c fastest.
std::vector<CostQuery> parse_sweep(std::string_view spec);

} // namespace aose

#endif // AOSE_COST_MODEL_HPP
