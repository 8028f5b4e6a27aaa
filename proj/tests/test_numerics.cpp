#include "doctest.h"

#include "aose/error.hpp"
#include "aose/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace aose;

TEST_CASE("matvec worked examples") {
    CHECK(matvec(Matrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
    CHECK(matvec(Matrix(2, 2), Vector{5, 7}) == Vector{0, 0});
    CHECK(matvec(Matrix::from_rows({{1, 2}, {3, 4}}), Vector{1, 1}) == Vector{3, 7});
}

TEST_CASE("matvec rejects a shape mismatch with a diagnostic") {
    try {
        matvec(Matrix(2, 3), Vector{1, 2});
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
        CHECK(std::string(e.what()).find("2x3") != std::string::npos);
    }
    CHECK_THROWS_AS(matvec_transposed(Matrix(2, 3), Vector{1, 2, 3}), Error);
}

TEST_CASE("matvec is linear") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
        Matrix m(r, c);
        for (double& x : m.span()) x = rng.symmetric() * 3;
        Vector x(c), y(c), combo(c);
        const double a = rng.symmetric() * 5, b = rng.symmetric() * 5;
        for (std::size_t i = 0; i < c; ++i) {
            x[i] = rng.symmetric();
            y[i] = rng.symmetric();
            combo[i] = a * x[i] + b * y[i];
        }
        const Vector lhs = matvec(m, combo);
        const Vector mx = matvec(m, x), my = matvec(m, y);
        for (std::size_t i = 0; i < r; ++i) CHECK(std::abs(lhs[i] - (a * mx[i] + b * my[i])) < 1e-10);
    }
}

TEST_CASE("tanh_vec") {
    CHECK(tanh_vec(Vector{0, 0}) == Vector{0, 0});
    // Frozen from tests/oracles/pooling_oracle.py.
    CHECK(tanh_vec(Vector{1})[0] == doctest::Approx(0.76159415595576488812).epsilon(1e-15));
    CHECK(tanh_vec(Vector{-1})[0] == -tanh_vec(Vector{1})[0]);

    SUBCASE("outputs stay strictly inside (-1, 1)") {
        for (double x : {-1e300, -710.0, -40.0, -19.5, 19.5, 40.0, 710.0, 1e300}) {
            const double y = tanh_vec(Vector{x})[0];
            CHECK(std::abs(y) < 1.0);
            CHECK(std::abs(y) > 0.99999999);
        }
    }
}

TEST_CASE("stable_softmax worked examples") {
    const Vector u = stable_softmax(Vector{0, 0, 0});
    for (double p : u) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(stable_softmax(Vector{123.4}) == Vector{1.0});
    CHECK(stable_softmax(Vector{-1e308}) == Vector{1.0});

    const Vector p = stable_softmax(Vector{0.761594, 0});
    CHECK(p[0] == doctest::Approx(0.68169970835443187663).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.31830029164556812337).epsilon(1e-14));

    const Vector big = stable_softmax(Vector{1e308, 0, -1e308});
    CHECK(big[0] == 1.0);
    CHECK(all_finite(big.span()));

    CHECK_THROWS_AS(stable_softmax(Vector{}), Error);
}

TEST_CASE("stable_softmax properties") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        Vector x(n);
        for (double& v : x) v = rng.symmetric() * 50;
        const Vector p = stable_softmax(x);

        const double sum = std::accumulate(p.begin(), p.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (double v : p) CHECK(v > 0.0);

        // Permutation equivariance.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        Vector xp(n);
        for (std::size_t i = 0; i < n; ++i) xp[i] = x[perm[i]];
        const Vector pp = stable_softmax(xp);
        for (std::size_t i = 0; i < n; ++i) CHECK(pp[i] == p[perm[i]]);

        // Shift invariance.
        const double shift = rng.symmetric() * 1000;
        Vector xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + shift;
        const Vector ps = stable_softmax(xs);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ps[i] - p[i]) <= 1e-12);
    }
}

TEST_CASE("log_sum_exp does not overflow") {
    CHECK(log_sum_exp(Vector{1000, 0}) == doctest::Approx(1000.0));
    CHECK(log_sum_exp(Vector{0, 0}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("l2_normalize") {
    const Vector a = l2_normalize(Vector{3, 4});
    CHECK(a[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(l2_normalize(Vector{1, 0, 0}) == Vector{1, 0, 0});
    const Vector b = l2_normalize(Vector{2, 2});
    CHECK(b[0] == doctest::Approx(0.7071067811865475244).epsilon(1e-15));
    CHECK(b[1] == b[0]);
    CHECK_THROWS_AS(l2_normalize(Vector{0, 0}), Error);

    SplitMix64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        Vector x(1 + rng.below(50));
        const double scale = std::pow(10.0, rng.symmetric() * 150);
        for (double& v : x) v = rng.normal() * scale;
        const Vector y = l2_normalize(x);
        CHECK(std::abs(l2_norm(y.span()) - 1.0) <= 1e-12);
        // Direction preserved.
        for (std::size_t i = 0; i < x.size(); ++i) CHECK((x[i] >= 0) == (y[i] >= 0));
    }
}

TEST_CASE("init_params") {
    const Matrix a = init_params(2, 2, Seed{7});
    const Matrix b = init_params(2, 2, Seed{7});
    CHECK(a == b);
    CHECK(init_params(2, 2, Seed{8}) != a);

    const Matrix big = init_params(768, 768, Seed{2024});
    const double bound = std::sqrt(6.0 / (768.0 + 768.0));
    double sum = 0.0;
    for (double v : big.span()) {
        CHECK_MESSAGE(std::abs(v) < bound, v);
        sum += v;
    }
    CHECK(std::abs(sum / static_cast<double>(big.size())) < 0.01);

    const Matrix small = init_params(1, 1, Seed{0});
    CHECK(std::abs(small(0, 0)) < std::sqrt(3.0));
    CHECK_THROWS_AS(init_params(0, 3, Seed{1}), Error);
}

TEST_CASE("checked constructors reject bad values") {
    CHECK_THROWS_AS(Vector::checked({}), Error);
    CHECK_THROWS_AS(Vector::checked({1.0, NAN}), Error);
    CHECK_THROWS_AS(Matrix::checked(2, 2, {1, 2, 3}), Error);
    CHECK_THROWS_AS(Matrix::checked(1, 1, {INFINITY}), Error);
    CHECK_NOTHROW(Matrix::checked(1, 2, {1, 2}));
}

TEST_CASE("splitmix64 reference stream") {
    // First outputs for seed 0 of the published splitmix64 generator.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next() == 0x06c45d188009454fULL);
}

TEST_CASE("normal draws have unit variance") {
    SplitMix64 rng(99);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}
