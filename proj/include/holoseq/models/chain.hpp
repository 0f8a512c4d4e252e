#pragma once

#include <Eigen/Dense>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/montecarlo.hpp"
#include "holoseq/ode.hpp"
#include "holoseq/series.hpp"

namespace holoseq {

/**
 * @brief Continuous-time chain on finitely many points of R^d.
 *
 * rates(i, j) is the jump rate from states[i] to states[j]; the diagonal is
 * ignored.
 */
struct FiniteChain {
    std::vector<std::vector<double>> states;
    Eigen::MatrixXd rates;

    std::size_t size() const { return states.size(); }
    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
    void validate() const;
    /// Index of x among the states (exact match); throws if absent.
    std::size_t state_index(std::span<const double> x) const;
};

/// L~_ik = sum_j lambda_ij (1_{k=j} - 1_{k=i}).
Eigen::MatrixXd chain_generator(const FiniteChain& chain);
/// exp(T L~)
Eigen::MatrixXd chain_transition(const FiniteChain& chain, double T);

/// Row of exp(T L~) at x0 times the vector of values h(x_k).
cplx chain_expectation(const FiniteChain& chain, const std::vector<cplx>& h, double T, std::span<const double> x0);

/// Lagrange basis v^i with h_{v^i}(x_k) = 1_{i=k}; d = 1 only.
SeriesVector lagrange_indicators(const FiniteChain& chain, int order);

/**
 * @brief c(T) = sum_i v^i w_i(T) with w' = L~ w, w(0) = h.
 *
 * The span of the v^i is invariant, so the flow runs on the N coordinates
 * (Dormand-Prince, rel_tol 1e-13) and h_{c(T)}(x_k) = E[h(X_T) | X_0 = x_k].
 */
CoeffSeries chain_expectation_series(const FiniteChain& chain, const std::vector<cplx>& h, double T, int order);

/**
 * @brief Series characteristics of the chain (d = 1).
 *
 * One kernel per ordered pair with intensity lambda_ij v^i and jump size
 * x_j - z, plus the drift that cancels the compensator. At the states the
 * generator is exactly sum_j lambda_ij (f(x_j) - f(x_i)).
 * Products with v^i raise the degree, so the truncated series flow of
 * these characteristics is not a usable route; use
 * chain_expectation_series.
 */
Characteristics chain_characteristics(const FiniteChain& chain, int order);

/// Exact jump chain for simulation: from the state nearest to x (within
/// 1e-9), channel j fires at rate lambda_ij and moves to x_j.
PathModel chain_path_model(const FiniteChain& chain);

struct ChainAffineFlow {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> psi;  ///< psi(t)_i per recorded time
};

/// psi' = R(psi), R(psi)_i = sum_j lambda_ij (exp(psi_j - psi_i) - 1), psi(0) = u.
ChainAffineFlow chain_affine_flow(const FiniteChain& chain, const Eigen::VectorXcd& u, const OdeConfig& cfg);

/// psi(T)_i = log (exp(T L~) exp(u))_i; throws VanishingCoefficientError near 0.
Eigen::VectorXcd chain_affine_log_route(const FiniteChain& chain, const Eigen::VectorXcd& u, double T,
                                        double eps_div = 1e-12);

/// Closed form for two states.
Eigen::Vector2cd two_state_affine(double l12, double l21, cplx u1, cplx u2, double t);

}  // namespace holoseq
