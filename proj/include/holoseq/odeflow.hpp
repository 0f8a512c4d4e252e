#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "holoseq/generator.hpp"
#include "holoseq/ode.hpp"
#include "holoseq/series.hpp"

namespace holoseq {

inline void ode_axpy(CoeffSeries& y, double a, const CoeffSeries& x) { y.add_scaled(a, x); }

enum class FlowKind { linear, riccati };

/**
 * @brief Snapshots of c(t) or psi(t) at every accepted step.
 *
 * Snapshots carry trusted degree min(trusted(u0), working order): the
 * buffer degrees feed the operator but are not claimed as accurate.
 */
struct SequenceFlow {
    FlowKind kind = FlowKind::linear;
    std::vector<double> times;
    std::vector<CoeffSeries> snapshots;
    std::size_t rhs_evaluations = 0;
    std::size_t rejected_steps = 0;

    const CoeffSeries& final_state() const { return snapshots.back(); }
    double t_end() const { return times.back(); }
};

SequenceFlow solve_linear(const LinearOperator& op, const CoeffSeries& u0, const OdeConfig& cfg);
SequenceFlow solve_riccati(const RiccatiOperator& op, const CoeffSeries& u0, const OdeConfig& cfg);

/**
 * @brief c(t) from c(0) = exp*(u0), then psi(t) = log*(c(t)).
 *
 * psi(t)_0 follows the continuous branch of log c(t)_0, accumulated from
 * principal logs of the ratios between consecutive snapshots.
 */
SequenceFlow riccati_from_linear(const LinearOperator& op, const CoeffSeries& u0, const OdeConfig& cfg,
                                 const LogOptions& log_opt = {});

struct FlowValue {
    cplx value = 0.0;
    /// sum over degrees above the trusted degree of |c_alpha| |x0|^alpha / alpha!
    double tail = 0.0;
    int trusted_degree = -1;
};

/// eval(c(T), x0) for a linear flow.
FlowValue holomorphic_expectation(const SequenceFlow& flow, std::span<const double> x0);
/// exp(eval(psi(T), x0)) for a Riccati flow; tail is that of psi(T).
FlowValue affine_expectation(const SequenceFlow& flow, std::span<const double> x0);

/// CSV: t, then per multi-index "re[a]" and "im[a]" columns (a = exponents joined by ':').
void write_flow_csv(std::ostream& os, const SequenceFlow& flow);

}  // namespace holoseq
