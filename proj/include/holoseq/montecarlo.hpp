#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/series.hpp"

namespace holoseq {

using PointFn = std::function<void(std::span<const double> x, std::span<double> out)>;
using RateFn = std::function<double(std::span<const double> x)>;

/// One jump channel: at rate rate(x), x -> x + size(x).
struct JumpChannel {
    RateFn rate;
    PointFn size;
};

/**
 * @brief Pointwise description of a jump-diffusion for simulation and for
 * the brute-force generator.
 *
 * The generator is A f = grad f . b + 1/2 tr(a Hess f)
 *   + sum_channels rate (f(x + size) - f - grad f . size).
 */
struct PathModel {
    std::size_t dim = 1;
    PointFn drift;      ///< b(x), d entries
    PointFn diffusion;  ///< a(x), d*d row-major
    std::vector<JumpChannel> jumps;

    std::optional<Box> box;       ///< declared state space; Euler steps reflect into it
    double absorb_below = -1.0;   ///< d = 1: x < absorb_below is sent to box->lo and frozen
    bool has_absorption() const { return absorb_below > 0.0; }
};

/// Channels lambda(x) w_m with sizes j(x, y_m), real parts of the series.
PathModel path_model(const Characteristics& chr);

/**
 * @brief A function with optional analytic derivatives.
 *
 * Missing derivatives are filled in by 4th-order central differences with
 * step 1e-4 (1 + |x_i|).
 */
struct Evaluable {
    std::function<cplx(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<cplx>)> gradient;
    std::function<void(std::span<const double>, std::span<cplx>)> hessian;  ///< d*d row-major
};

Evaluable evaluable_from_series(const CoeffSeries& u);
/// x -> exp(h_u(x))
Evaluable evaluable_exp_series(const CoeffSeries& u);

struct GeneratorTerms {
    cplx drift = 0.0, diffusion = 0.0, jump = 0.0;
    double scale = 0.0;  ///< sum of moduli of the individual contributions
    cplx total() const { return drift + diffusion + jump; }
};

GeneratorTerms pointwise_generator_terms(const PathModel& m, const Evaluable& f, std::span<const double> x);
cplx pointwise_generator(const PathModel& m, const Evaluable& f, std::span<const double> x);

enum class JumpMode {
    thinning,  ///< candidates at rate intensity_bound, accepted with rate(x)/bound
    per_step,  ///< each channel fires with probability 1 - exp(-rate dt) per step
};

struct McConfig {
    std::size_t paths = 10000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    JumpMode mode = JumpMode::thinning;
    double intensity_bound = 0.0;  ///< thinning only; 0 = sum of rates at x0 times 2
    unsigned threads = 0;          ///< 0 = hardware concurrency capped by HOLOSEQ_THREADS
};

struct McEstimate {
    cplx mean = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
    std::size_t clamp_count = 0;     ///< Euler steps reflected back into the box
    std::size_t exit_count = 0;      ///< paths that ended outside the box
    std::size_t absorbed_count = 0;  ///< paths absorbed below the threshold
    double jumps_per_path = 0.0;
    double jumps_stderr = 0.0;
    double dt = 0.0;
};

using PathFn = std::function<cplx(std::span<const double>)>;

/// Euler scheme with jumps; mean and standard error of h(X_T).
McEstimate simulate_expectation(const PathModel& m, const PathFn& h, std::span<const double> x0, double T,
                                const McConfig& cfg);
McEstimate simulate_expectation(const Characteristics& chr, const PathFn& h, std::span<const double> x0,
                                double T, const McConfig& cfg);

/// Estimate of E[f(X_T) - f(x0) - int_0^T A f(X_s) ds] (left-point rule).
McEstimate martingale_audit(const PathModel& m, const Evaluable& f, std::span<const double> x0, double T,
                            const McConfig& cfg);

/// Number of worker threads a run would use.
unsigned mc_thread_count(const McConfig& cfg);

}  // namespace holoseq
