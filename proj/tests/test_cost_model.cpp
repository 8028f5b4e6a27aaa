#include "doctest.h"

#include "aose/cost_model.hpp"
#include "aose/error.hpp"

#include <limits>
#include <sstream>

using namespace aose;

TEST_CASE("cost formulas") {
    CHECK(costs({1, 1, 1, 1, 1}) == CostReport{1, 2, 1, 1, 2});
    CHECK(costs({10, 20, 2, 4, 512}) == CostReport{40'000, 4'100, 1'192, 102'400, 4'010});
    CHECK(costs({1, 512, 1, 512, 512}).roberta == 262'144);
}

TEST_CASE("cost query validation") {
    CHECK_THROWS_AS(costs({2, 3, 7, 1, 1}), Error);
    CHECK_NOTHROW(costs({2, 3, 6, 1, 1}));
    CHECK_THROWS_AS(costs({0, 3, 1, 1, 1}), Error);
    CHECK_THROWS_AS(costs({1, 0, 1, 1, 1}), Error);
    CHECK_THROWS_AS(costs({1, 1, 0, 1, 1}), Error);
    CHECK_THROWS_AS(costs({1, 1, 1, 0, 1}), Error);
    CHECK_THROWS_AS(costs({1, 1, 1, 1, 0}), Error);
    const std::uint64_t big = std::uint64_t{1} << 32;
    CHECK_THROWS_AS(costs({big, big, 1, 1, 1}), Error);
    CHECK_THROWS_AS(costs({std::numeric_limits<std::uint64_t>::max(), 2, 1, 1, 1}), Error);
}

TEST_CASE("cost invariants") {
    for (std::uint64_t t = 1; t <= 60; ++t) {
        for (std::uint64_t l = 1; l <= 60; ++l) {
            const CostReport r = costs({t, l, 1, 3, 7});
            if (t >= 2 && l >= 2) CHECK(r.aose < r.roberta);
            CHECK(r.aose <= r.smith);
            CHECK(std::int64_t(r.aose) - std::int64_t(r.smith) == std::int64_t(t) - std::int64_t(t * t));

            const CostReport twice = costs({2 * t, l, 1, 3, 7});
            CHECK(twice.roberta == 4 * r.roberta);
            CHECK(twice.aose <= 2 * r.aose);
        }
    }
}

TEST_CASE("sweep csv") {
    const std::vector<CostQuery> one{{10, 20, 2, 4, 512}};
    CHECK(sweep_csv(one) == "t,l,g,w,c,roberta,smith,longformer,xlnet,aose\n"
                            "10,20,2,4,512,40000,4100,1192,102400,4010\n");
    const std::vector<CostQuery> two{{2, 2, 1, 1, 1}, {1, 1, 1, 1, 1}};
    CHECK(sweep_csv(two) == "t,l,g,w,c,roberta,smith,longformer,xlnet,aose\n"
                            "2,2,1,1,1,16,12,7,4,10\n"
                            "1,1,1,1,1,1,2,1,1,2\n");

    const auto queries = parse_sweep("t=1:100,l=20");
    REQUIRE(queries.size() == 100);
    std::uint64_t prev = 0;
    for (const auto& q : queries) {
        const std::uint64_t a = costs(q).aose;
        CHECK(a > prev);
        prev = a;
    }
    CHECK(queries.front().g == 1);
    CHECK(queries.back().t == 100);

    const auto grid = parse_sweep("t=1:3,l=2:10:4,c=512");
    REQUIRE(grid.size() == 9);
    CHECK(grid[0].t == 1);
    CHECK(grid[1].l == 6);
    CHECK(grid[3].t == 2);
    CHECK(grid[8].c == 512);
}

TEST_CASE("sweep parse errors") {
    CHECK_THROWS_AS(parse_sweep("t=0"), Error);
    CHECK_THROWS_AS(parse_sweep("q=3"), Error);
    CHECK_THROWS_AS(parse_sweep("t=5:1"), Error);
    CHECK_THROWS_AS(parse_sweep("t=1:5:0"), Error);
    CHECK_THROWS_AS(parse_sweep("t=abc"), Error);
    CHECK_THROWS_AS(parse_sweep("t"), Error);
    CHECK_THROWS_AS(parse_sweep("t=1,t=2"), Error);
    CHECK_THROWS_AS(parse_sweep("t=1,g=5"), Error);
    CHECK(parse_sweep("").size() == 1);
}
