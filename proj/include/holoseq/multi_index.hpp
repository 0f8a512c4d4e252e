#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace holoseq {

/**
 * @brief Multi-index alpha = (alpha_1, ..., alpha_d) of non-negative exponents.
 *
 * Ordered graded-lexicographically: first by |alpha|, then lexicographically
 * with larger leading exponents first, so (2,0) < (1,1) < (0,2).
 */
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<unsigned> exps) : e_(std::move(exps)) {}
    MultiIndex(std::initializer_list<unsigned> exps) : e_(exps) {}

    static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<unsigned>(dim, 0)); }
    static MultiIndex unit(std::size_t dim, std::size_t i);

    std::size_t dim() const { return e_.size(); }
    unsigned operator[](std::size_t i) const { return e_[i]; }
    unsigned& operator[](std::size_t i) { return e_[i]; }
    std::span<const unsigned> exponents() const { return e_; }

    unsigned degree() const;
    double factorial() const;
    bool is_zero() const { return degree() == 0; }

    MultiIndex operator+(const MultiIndex& o) const;
    /// Componentwise difference; requires o <= *this entrywise.
    MultiIndex operator-(const MultiIndex& o) const;
    bool dominates(const MultiIndex& o) const;

    bool operator==(const MultiIndex& o) const = default;
    std::strong_ordering operator<=>(const MultiIndex& o) const;

    std::string to_string() const;

private:
    std::vector<unsigned> e_;
};

/**
 * @brief Enumeration of all multi-indices with |alpha| <= N in dimension d.
 *
 * Shared per (d, N) through get(); immutable after construction except for
 * the lazily built convolution table, whose construction is synchronized.
 */
class IndexSpace {
public:
    static constexpr int kMaxOrder = 170;  // largest n with n! finite in double
    static constexpr std::size_t kMaxDim = 8;

    /// Pairs (beta, gamma) with beta + gamma = alpha, grouped by alpha, with
    /// weight alpha!/(beta! gamma!).
    struct Convolution {
        std::vector<std::uint32_t> start;  // size() + 1 offsets
        std::vector<std::uint32_t> left;
        std::vector<std::uint32_t> right;
        std::vector<double> weight;
    };

    static std::shared_ptr<const IndexSpace> get(std::size_t dim, int order);

    std::size_t dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return degree_.size(); }

    std::span<const unsigned> exponents(std::size_t idx) const {
        return {exps_.data() + idx * dim_, dim_};
    }
    MultiIndex multi_index(std::size_t idx) const;
    int degree(std::size_t idx) const { return degree_[idx]; }
    double factorial(std::size_t idx) const { return fact_[idx]; }
    double inv_factorial(std::size_t idx) const { return inv_fact_[idx]; }
    std::span<const double> inv_factorials() const { return inv_fact_; }

    /// Offset of the first index of degree k; degree_begin(N + 1) == size().
    std::size_t degree_begin(int k) const { return deg_begin_[static_cast<std::size_t>(k)]; }

    /// Index of alpha; throws std::out_of_range if |alpha| > N or dims differ.
    std::size_t index_of(std::span<const unsigned> alpha) const;
    std::size_t index_of(const MultiIndex& alpha) const { return index_of(alpha.exponents()); }

    /// Index of alpha + beta, or npos if the degree exceeds N.
    std::size_t index_of_sum(std::size_t alpha, std::span<const unsigned> beta) const;

    const Convolution& convolution() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    IndexSpace(std::size_t dim, int order);

private:
    std::uint64_t key(std::span<const unsigned> alpha) const;

    std::size_t dim_;
    int order_;
    std::vector<unsigned> exps_;
    std::vector<int> degree_;
    std::vector<double> fact_;
    std::vector<double> inv_fact_;
    std::vector<std::size_t> deg_begin_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;

    mutable std::once_flag conv_once_;
    mutable Convolution conv_;
};

/// C(n, k) as double, exact for the sizes used here.
double binomial(unsigned n, unsigned k);

}  // namespace holoseq
