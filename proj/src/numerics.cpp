#include "aose/numerics.hpp"

#include "aose/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace aose {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    if (!all_finite(values)) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " contains a non-finite value");
    }
}

} // namespace

Vector Vector::checked(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "vector must have at least one entry");
    }
    require_finite(values, "vector");
    return Vector(std::move(values));
}

Matrix Matrix::checked(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (rows == 0 || cols == 0) {
        throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
    }
    if (values.size() != rows * cols) {
        throw Error(ErrorCode::ShapeMismatch,
                    "matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                        std::to_string(values.size()) + " values");
    }
    require_finite(values, "matrix");
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.span().begin());
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
        values.insert(values.end(), row.begin(), row.end());
    }
    return checked(r, c, std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(std::span<const double> x) {
    // Scaled to avoid overflow/underflow of the squared sum.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double acc = 0.0;
    for (double v : x) {
        const double s = v / scale;
        acc += s * s;
    }
    return scale * std::sqrt(acc);
}

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

Vector matvec(const Matrix& m, const Vector& x) {
    if (m.cols() != x.size()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "matvec: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + " but vector has length " +
                        std::to_string(x.size()));
    }
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), x.span());
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& x) {
    if (m.rows() != x.size()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "matvec_transposed: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + " but vector has length " +
                        std::to_string(x.size()));
    }
    Vector out(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * xr;
    }
    return out;
}

namespace {

// Ascending-order sum; the result does not depend on the input order.
double order_free_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

} // namespace

Vector tanh_vec(const Vector& x) {
    Vector out(x.size());
    // Outputs stay strictly inside (-1, 1).
    static constexpr double below_one = 1.0 - 0x1.0p-53;
    std::transform(x.begin(), x.end(), out.begin(),
                   [](double v) { return std::clamp(std::tanh(v), -below_one, below_one); });
    return out;
}

Vector stable_softmax(const Vector& logits) {
    if (logits.empty()) throw Error(ErrorCode::InvalidArgument, "softmax of an empty vector");
    const double shift = *std::max_element(logits.begin(), logits.end());
    Vector out(logits.size());
    std::transform(logits.begin(), logits.end(), out.begin(),
                   [shift](double v) { return std::exp(v - shift); });
    const double total = order_free_sum(out.values());
    for (double& v : out) v /= total;
    return out;
}

double log_sum_exp(const Vector& logits) {
    if (logits.empty()) throw Error(ErrorCode::InvalidArgument, "log-sum-exp of an empty vector");
    const double shift = *std::max_element(logits.begin(), logits.end());
    std::vector<double> terms(logits.size());
    std::transform(logits.begin(), logits.end(), terms.begin(),
                   [shift](double v) { return std::exp(v - shift); });
    return shift + std::log(order_free_sum(std::move(terms)));
}

Vector l2_normalize(const Vector& x) {
    const double norm = l2_norm(x.span());
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
    }
    Vector out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [norm](double v) { return v / norm; });
    return out;
}

Matrix init_params(std::size_t rows, std::size_t cols, Seed seed) {
    if (rows == 0 || cols == 0) {
        throw Error(ErrorCode::InvalidArgument, "init_params: dimensions must be positive");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    SplitMix64 rng(seed.value);
    Matrix m(rows, cols);
    for (double& v : m.span()) {
        v = bound * rng.symmetric();
        // Rounding of bound * (1 - 2^-53) can land on the bound itself.
        if (std::abs(v) >= bound) v = std::nextafter(v, 0.0);
    }
    return m;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

double SplitMix64::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::symmetric() noexcept {
    const double open = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    return 2.0 * open - 1.0;
}

double SplitMix64::normal() noexcept {
    const double u1 = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
    // Reject the low remainder so the modulo is unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

std::uint64_t fnv1a(std::span<const std::byte> bytes, std::uint64_t basis) noexcept {
    std::uint64_t h = basis;
    for (std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace aose
