#ifndef AOSE_NUMERICS_HPP
#define AOSE_NUMERICS_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace aose {

struct Seed {
    std::uint64_t value = 0;
};

// Dense 64-bit vector. Length is fixed at construction.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    explicit Vector(std::vector<double> values) : values_(std::move(values)) {}
    Vector(std::initializer_list<double> values) : values_(values) {}

    // Rejects empty or non-finite input.
    static Vector checked(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> span() noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> values_;
};

// Dense row-major 64-bit matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    // Rejects zero dimensions, a size mismatch, or non-finite values.
    static Matrix checked(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    std::span<double> span() noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> x);
bool all_finite(std::span<const double> x);

Vector matvec(const Matrix& m, const Vector& x);
// m^T x, used by the backward passes.
Vector matvec_transposed(const Matrix& m, const Vector& x);

Vector tanh_vec(const Vector& x);

// Softmax via max-subtraction. Throws on empty input.
Vector stable_softmax(const Vector& logits);
// log(sum(exp(x))) with the same shift. Throws on empty input.
double log_sum_exp(const Vector& logits);

// Throws on a zero (or non-finite-norm) vector.
Vector l2_normalize(const Vector& x);

// Xavier-uniform entries in (-a, a), a = sqrt(6 / (rows + cols)).
Matrix init_params(std::size_t rows, std::size_t cols, Seed seed);

// splitmix64 stream. Identical seeds produce identical sequences on every
// platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() noexcept;
    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    // Uniform in (-1, 1), never exactly +-1.
    double symmetric() noexcept;
    // Box-Muller; consumes two draws per call.
    double normal() noexcept;
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t state_;
};

// Finalizer of splitmix64; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a over raw bytes, chained through `basis`.
std::uint64_t fnv1a(std::span<const std::byte> bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

} // namespace aose

#endif // AOSE_NUMERICS_HPP
