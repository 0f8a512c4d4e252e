#pragma once

#include <utility>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/montecarlo.hpp"

namespace holoseq {

/**
 * @brief Martingale on [0, 1] with a(x) = x(1-x)(1-x/2) and a jump to 0 at
 * rate (1-x)(1-x/2)/x.
 *
 * Its dual is the chain on N_0 with beta_{k,k-1} = (k+2)(k-1)/4 and
 * beta_{k,k+1} = (k+2)(k-1)/2 for k >= 2, truncated at k_max.
 */
struct UnitIntervalModel {
    int k_max = 200;
    double outflow_tol = 1e-8;  ///< bound on the value carried above k_max
    double absorb_below = 1e-6;

    void validate() const;
};

struct RateTable {
    /// rows[k] = (j, beta_kj), k = 0..k_max, targets j <= k_max only
    std::vector<std::vector<std::pair<int, double>>> rows;
    /// rate of the dropped transition k_max -> k_max + 1
    double dropped_rate = 0.0;
};

RateTable unit_interval_rates(const UnitIntervalModel& model);

struct UnitIntervalDual {
    /// mu_k(T) = c(T)_k 2^k / k!, k = 0..k_max, in the units of the input u
    std::vector<double> mu;
    /// c(T) as a series of order min(k_max, 150)
    CoeffSeries c;
    double mass0 = 0.0;      ///< sum mu_k(0)
    double outflow = 0.0;    ///< mass lost above k_max, same units
    double value_bound = 0.0;  ///< bound on |E h(X_T)| carried by the lost mass at x in [0, 1]
    std::size_t poisson_terms = 0;

    /// sum_k mu_k (x/2)^k
    double evaluate(double x) const;
};

/**
 * @brief c(T) for u in W* (u_k = mu_k k!/2^k, mu_k >= 0) by uniformization.
 *
 * The input is normalized to unit mass and the result scaled back. Throws
 * TruncationError if value_bound exceeds outflow_tol times the mass.
 */
UnitIntervalDual unit_interval_dual(const UnitIntervalModel& model, const CoeffSeries& u, double T);

/// Moment-form characteristics: a as above, m^beta = (-1)^beta z^{beta-1}(1 - 3z/2 + z^2/2).
Characteristics unit_interval_characteristics(int order);

/// Path model on the box [0, 1]; absorbed below model.absorb_below.
PathModel unit_interval_path_model(const UnitIntervalModel& model);

/// A f for f = (x/2)^k: ((k+2)(k-1)/4)(f_{k-1} + 2 f_{k+1} - 3 f_k) for k >= 2.
double unit_interval_generator_fk(int k, double x);

}  // namespace holoseq
