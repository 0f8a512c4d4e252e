#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "holoseq/errors.hpp"

namespace holoseq {

enum class OdeMethod { rk4, rk45 };

/**
 * @brief Integrator settings.
 *
 * rk4 uses ceil(t_end / step) equal steps. rk45 is Dormand-Prince with
 * error control err <= abs_tol + rel_tol * |y| in the caller's norm.
 */
struct OdeConfig {
    OdeMethod method = OdeMethod::rk45;
    double t_end = 1.0;
    double step = 0.0;        ///< rk4 step; 0 = t_end / 100
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  ///< rk45; 0 = t_end / 100
    std::size_t max_steps = 1000000;
    double r_ref = 1.0;  ///< radius of the weighted error norm for series states

    void validate() const;
};

inline void OdeConfig::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("ode: T must be > 0");
    if (step < 0.0 || initial_step < 0.0) throw ValidationError("ode: step must be > 0");
    if (method == OdeMethod::rk45 && (!(rel_tol > 0.0) || !(abs_tol >= 0.0)))
        throw ValidationError("ode: tolerances must be > 0");
    if (max_steps == 0) throw ValidationError("ode: max_steps must be >= 1");
    if (!(r_ref > 0.0)) throw ValidationError("ode: reference radius must be > 0");
}

/// y += a * x; overloaded for states with a cheaper in-place form.
template <class State>
void ode_axpy(State& y, double a, const State& x) {
    y += a * x;
}

template <class State>
struct OdeTrajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::size_t rhs_evaluations = 0;
    std::size_t rejected_steps = 0;
};

namespace detail {

template <class State>
State combine(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms)
        if (c != 0.0) ode_axpy(out, h * c, *k);
    return out;
}

}  // namespace detail

/// Fixed-step classical Runge-Kutta. `f(t, y)` returns y'.
template <class State, class Rhs>
OdeTrajectory<State> integrate_rk4(Rhs&& f, State y, double T, double step) {
    OdeTrajectory<State> tr;
    const double h0 = step > 0.0 ? step : T / 100.0;
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / h0 - 1e-9)));
    const double h = T / static_cast<double>(n);
    tr.times.push_back(0.0);
    tr.states.push_back(y);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = h * static_cast<double>(k);
        const State k1 = f(t, y);
        const State k2 = f(t + h / 2, detail::combine(y, h, {{0.5, &k1}}));
        const State k3 = f(t + h / 2, detail::combine(y, h, {{0.5, &k2}}));
        const State k4 = f(t + h, detail::combine(y, h, {{1.0, &k3}}));
        y = detail::combine(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
        tr.rhs_evaluations += 4;
        tr.times.push_back(k + 1 == n ? T : t + h);
        tr.states.push_back(y);
    }
    return tr;
}

/**
 * @brief Dormand-Prince 5(4) with an FSAL stage.
 *
 * `norm(y)` is the error norm. Every accepted step is recorded. Throws
 * StepUnderflowError when the step collapses or the budget runs out.
 */
template <class State, class Rhs, class Norm>
OdeTrajectory<State> integrate_rk45(Rhs&& f, State y, const OdeConfig& cfg, Norm&& norm) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double T = cfg.t_end;
    OdeTrajectory<State> tr;
    tr.times.push_back(0.0);
    tr.states.push_back(y);
    double t = 0.0;
    double h = cfg.initial_step > 0.0 ? cfg.initial_step : T / 100.0;
    State k1 = f(t, y);
    tr.rhs_evaluations = 1;
    std::size_t steps = 0;
    while (t < T) {
        if (steps++ >= cfg.max_steps)
            throw StepUnderflowError("ode: step budget exhausted at t = " + std::to_string(t), t);
        const bool last = t + h >= T * (1.0 - 1e-14);
        if (last) h = T - t;
        if (h <= 1e-14 * std::max(1.0, std::abs(t)))
            throw StepUnderflowError("ode: step size underflow at t = " + std::to_string(t), t);

        const State k2 = f(t + c2 * h, detail::combine(y, h, {{a21, &k1}}));
        const State k3 = f(t + c3 * h, detail::combine(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = f(t + c4 * h, detail::combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = f(t + c5 * h, detail::combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 =
            f(t + h, detail::combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        State yn = detail::combine(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = f(t + h, yn);
        tr.rhs_evaluations += 6;

        State err = e1 * k1;
        ode_axpy(err, e3, k3);
        ode_axpy(err, e4, k4);
        ode_axpy(err, e5, k5);
        ode_axpy(err, e6, k6);
        ode_axpy(err, e7, k7);
        const double en = h * norm(err);
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(norm(y), norm(yn));
        if (!std::isfinite(en)) {
            h *= 0.25;
            ++tr.rejected_steps;
            continue;
        }
        const double ratio = en / scale;
        if (ratio <= 1.0) {
            t = last ? T : t + h;
            y = std::move(yn);
            k1 = k7;
            tr.times.push_back(t);
            tr.states.push_back(y);
        } else {
            ++tr.rejected_steps;
        }
        const double fac = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h *= ratio <= 1.0 ? fac : std::min(fac, 1.0);
    }
    return tr;
}

}  // namespace holoseq
