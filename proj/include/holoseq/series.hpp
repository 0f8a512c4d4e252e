#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "holoseq/multi_index.hpp"

namespace holoseq {

using cplx = std::complex<double>;

/**
 * @brief Truncated multi-index coefficient sequence.
 *
 * Represents h_u(z) = sum_{|alpha| <= N} u_alpha z^alpha / alpha!. Coefficients
 * are stored densely in graded-lex order of the shared IndexSpace.
 *
 * trusted_degree() is the largest degree up to which coefficients are exact
 * given the truncations in the operation history. It ranges over [-1, N];
 * -1 means no coefficient can be trusted.
 */
class CoeffSeries {
public:
    CoeffSeries() = default;
    CoeffSeries(std::size_t dim, int order);

    static CoeffSeries constant(std::size_t dim, int order, cplx c);
    /// h(z) = z_i
    static CoeffSeries variable(std::size_t dim, int order, std::size_t i);
    static CoeffSeries from_terms(std::size_t dim, int order,
                                  const std::vector<std::pair<MultiIndex, cplx>>& terms);

    std::size_t dim() const { return space_->dim(); }
    int order() const { return space_->order(); }
    std::size_t size() const { return coeffs_.size(); }
    const IndexSpace& space() const { return *space_; }
    const std::shared_ptr<const IndexSpace>& space_ptr() const { return space_; }
    bool empty() const { return !space_; }

    int trusted_degree() const { return trusted_; }
    void set_trusted_degree(int t);

    cplx operator[](std::size_t idx) const { return coeffs_[idx]; }
    cplx& operator[](std::size_t idx) { return coeffs_[idx]; }
    /// Coefficient at alpha; zero if |alpha| > N.
    cplx at(const MultiIndex& alpha) const;
    void set(const MultiIndex& alpha, cplx v);

    std::span<const cplx> coeffs() const { return coeffs_; }
    std::span<cplx> coeffs() { return coeffs_; }

    /// Copy with a different order: padding with zeros or dropping degrees.
    /// The trusted degree is capped at the new order.
    CoeffSeries reordered(int new_order) const;

    /// Smallest degree with a nonzero trusted coefficient, else trusted + 1.
    int valuation() const;

    bool same_shape(const CoeffSeries& o) const { return space_ == o.space_; }

    CoeffSeries& operator+=(const CoeffSeries& o);
    CoeffSeries& operator-=(const CoeffSeries& o);
    CoeffSeries& operator*=(cplx s);
    /// this += a * o
    CoeffSeries& add_scaled(cplx a, const CoeffSeries& o);

    friend CoeffSeries operator+(CoeffSeries a, const CoeffSeries& b) { return a += b; }
    friend CoeffSeries operator-(CoeffSeries a, const CoeffSeries& b) { return a -= b; }
    friend CoeffSeries operator*(cplx s, CoeffSeries a) { return a *= s; }
    friend CoeffSeries operator*(double s, CoeffSeries a) { return a *= cplx(s); }
    friend CoeffSeries operator-(CoeffSeries a) { return a *= cplx(-1.0); }

    bool operator==(const CoeffSeries& o) const;

private:
    void check_shape(const CoeffSeries& o, const char* op) const;

    std::shared_ptr<const IndexSpace> space_;
    std::vector<cplx> coeffs_;
    int trusted_ = -1;
};

using SeriesVector = std::vector<CoeffSeries>;

/**
 * @brief Symmetric d x d matrix of series (diffusion characteristic).
 */
class SeriesMatrix {
public:
    SeriesMatrix() = default;
    SeriesMatrix(std::size_t dim, int order);

    std::size_t rows() const { return n_; }
    const CoeffSeries& operator()(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }
    /// Sets both (i,j) and (j,i).
    void set(std::size_t i, std::size_t j, const CoeffSeries& s);
    bool is_symmetric() const;

private:
    std::size_t n_ = 0;
    std::vector<CoeffSeries> e_;
};

// --- operations -------------------------------------------------------------

CoeffSeries unit(std::size_t dim, int order);
CoeffSeries zero(std::size_t dim, int order);

CoeffSeries lin_comb(cplx a, const CoeffSeries& u, cplx b, const CoeffSeries& v);

/// (u*v)_alpha = sum_{beta+gamma=alpha} alpha!/(beta! gamma!) u_beta v_gamma
CoeffSeries mul(const CoeffSeries& u, const CoeffSeries& v);

/// u^1^{*beta_1} * ... * u^d^{*beta_d}
CoeffSeries pow(const SeriesVector& u, const MultiIndex& beta);

/// u^{(beta)}_alpha = u_{alpha+beta}
CoeffSeries shift(const CoeffSeries& u, const MultiIndex& beta);

CoeffSeries exp_star(const CoeffSeries& u);

enum class LogMethod {
    recurrence,  ///< solve D^{e_i} c = c * D^{e_i} psi degree by degree
    series,      ///< sum_k w_k d^{*k} with d = c/c_0 - 1
};

enum class LogWeights {
    inverse_k,  ///< (-1)^{k-1} / k
    factorial,  ///< (-1)^{k-1} (k-1)!
};

struct LogOptions {
    double eps_div = 1e-12;
    LogMethod method = LogMethod::recurrence;
    LogWeights weights = LogWeights::inverse_k;  ///< series method only
};

/// Inverse of exp_star with psi_0 = phi0 (the caller picks the branch).
CoeffSeries log_star(const CoeffSeries& c, cplx phi0, const LogOptions& opt = {});

/// Coefficients of h_u(z + h_v(z)).
CoeffSeries compose_shift(const CoeffSeries& u, const SeriesVector& v);

/// Precomputed powers v^{*beta} for repeated composition with the same v.
struct ComposePlan {
    SeriesVector v;
    std::vector<CoeffSeries> powers;  // indexed like the IndexSpace of v
};

ComposePlan make_compose_plan(const SeriesVector& v);
CoeffSeries compose_shift(const CoeffSeries& u, const ComposePlan& plan);

cplx eval(const CoeffSeries& u, std::span<const cplx> z);
cplx eval(const CoeffSeries& u, std::span<const double> x);
cplx eval(const CoeffSeries& u, std::initializer_list<double> x);

/// sum |u_alpha| r^alpha / alpha!
double abs_norm(const CoeffSeries& u, std::span<const double> r);
double abs_norm(const CoeffSeries& u, double r);

/// abs_norm restricted to degrees in [lo, hi].
double abs_norm_range(const CoeffSeries& u, std::span<const double> r, int lo, int hi);

/// Weighted distance sum_{|alpha| <= deg} |u_alpha - v_alpha| r^alpha/alpha!.
double trusted_distance(const CoeffSeries& u, const CoeffSeries& v, double r, int deg);

}  // namespace holoseq
