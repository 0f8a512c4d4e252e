#include "holoseq/models/unit_interval.hpp"

#include <cmath>

#include "holoseq/errors.hpp"

namespace holoseq {

namespace {

constexpr int kMaxSeriesOrder = 150;  // k!/2^k stays finite well below 170

double up_rate(int k) { return k >= 2 ? (k + 2.0) * (k - 1.0) / 2.0 : 0.0; }
double down_rate(int k) { return k >= 2 ? (k + 2.0) * (k - 1.0) / 4.0 : 0.0; }

}  // namespace

void UnitIntervalModel::validate() const {
    if (k_max < 4) throw ValidationError("unit interval: K_max must be >= 4");
    if (!(outflow_tol > 0.0)) throw ValidationError("unit interval: outflow tolerance must be > 0");
    if (!(absorb_below > 0.0 && absorb_below < 1.0)) throw ValidationError("unit interval: delta must be in (0, 1)");
}

RateTable unit_interval_rates(const UnitIntervalModel& model) {
    model.validate();
    RateTable t;
    t.rows.resize(static_cast<std::size_t>(model.k_max) + 1);
    for (int k = 2; k <= model.k_max; ++k) {
        t.rows[k].push_back({k - 1, down_rate(k)});
        if (k < model.k_max) t.rows[k].push_back({k + 1, up_rate(k)});
    }
    t.dropped_rate = up_rate(model.k_max);
    return t;
}

double UnitIntervalDual::evaluate(double x) const {
    double s = 0.0;
    for (std::size_t k = mu.size(); k-- > 0;) s = s * (x / 2.0) + mu[k];
    return s;
}

UnitIntervalDual unit_interval_dual(const UnitIntervalModel& model, const CoeffSeries& u, double T) {
    model.validate();
    if (u.empty() || u.dim() != 1) throw ValidationError("unit interval dual: u must be one-dimensional");
    if (!(T >= 0.0)) throw ValidationError("unit interval dual: T must be >= 0");
    const int kmax = model.k_max;
    const std::size_t n = static_cast<std::size_t>(kmax) + 1;

    std::vector<double> mu0(n, 0.0);
    for (int k = 0; k <= u.order(); ++k) {
        const cplx v = u[k];
        if (v.imag() != 0.0 || !(v.real() >= 0.0) || !std::isfinite(v.real()))
            throw ValidationError("unit interval dual: u must be real with u_k >= 0");
        if (v.real() == 0.0) continue;
        if (k > kmax) throw ValidationError("unit interval dual: u has coefficients above K_max");
        mu0[k] = v.real() * std::exp(k * std::log(2.0) - std::lgamma(k + 1.0));
    }
    double mass0 = 0.0;
    for (double m : mu0) mass0 += m;

    UnitIntervalDual out;
    out.mass0 = mass0;
    const int order = std::min(kmax, kMaxSeriesOrder);
    auto finish = [&](std::vector<double> mu) {
        out.mu = std::move(mu);
        out.c = CoeffSeries(1, order);
        for (int k = 0; k <= order; ++k)
            out.c[k] = out.mu[k] * std::exp(std::lgamma(k + 1.0) - k * std::log(2.0));
    };
    if (T == 0.0 || mass0 == 0.0) {
        finish(mu0);
        if (u.order() <= order)
            for (int k = 0; k <= u.order(); ++k) out.c[k] = u[k];
        return out;
    }

    const RateTable rates = unit_interval_rates(model);
    std::vector<double> out_rate(n, 0.0);
    double max_rate = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& [j, r] : rates.rows[k]) out_rate[k] += r;
        if (static_cast<int>(k) == kmax) out_rate[k] += rates.dropped_rate;
        max_rate = std::max(max_rate, out_rate[k]);
    }
    const double lam = 1.05 * max_rate;
    const double lt = lam * T;

    std::vector<double> v(n), next(n), p(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) v[k] = mu0[k] / mass0;
    double wsum = 0.0;
    for (std::size_t step = 0;; ++step) {
        const double w = std::exp(-lt + step * std::log(lt) - std::lgamma(step + 1.0));
        wsum += w;
        for (std::size_t k = 0; k < n; ++k) p[k] += w * v[k];
        ++out.poisson_terms;
        // past the mode the tail is at most w (s + 1) / (s + 1 - lt)
        const double s1 = static_cast<double>(step) + 1.0;
        if (s1 > lt + 1.0 && w * s1 / (s1 - lt) < 1e-16 * wsum) break;
        if (step > 10 * static_cast<std::size_t>(lt) + 1000)
            throw NumericalError("unit interval dual: Poisson series did not converge");
        for (std::size_t k = 0; k < n; ++k) next[k] = v[k] * (1.0 - out_rate[k] / lam);
        for (std::size_t k = 0; k < n; ++k)
            for (const auto& [j, r] : rates.rows[k]) next[j] += v[k] * r / lam;
        std::swap(v, next);
    }
    double pm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] /= wsum;
        pm += p[k];
    }
    out.outflow = std::max(0.0, 1.0 - pm) * mass0;
    out.value_bound = out.outflow * (kmax + 2.0) * std::ldexp(1.0, -kmax);
    if (out.value_bound > model.outflow_tol * mass0)
        throw TruncationError("unit interval dual: mass above K_max = " + std::to_string(kmax) +
                              " is not negligible; widen K_max");
    for (auto& x : p) x *= mass0;
    finish(std::move(p));
    return out;
}

Characteristics unit_interval_characteristics(int order) {
    if (order < 3) throw ValidationError("unit interval: order must be >= 3");
    Characteristics c(1, order);
    c.drift[0] = zero(1, order);
    // x(1-x)(1-x/2) = x - 3/2 x^2 + 1/2 x^3
    c.diffusion.set(0, 0, CoeffSeries::from_terms(1, order, {{MultiIndex{1}, 1.0}, {MultiIndex{2}, -3.0},
                                                             {MultiIndex{3}, 3.0}}));
    MomentTable t(order);
    for (int b = 2; b <= order; ++b) {
        const double sgn = b % 2 == 0 ? 1.0 : -1.0;
        CoeffSeries m = zero(1, order);
        const double poly[3] = {1.0, -1.5, 0.5};
        for (int i = 0; i < 3; ++i) {
            const int deg = b - 1 + i;
            if (deg <= order) m[deg] = sgn * poly[i] * std::tgamma(deg + 1.0);
        }
        t.insert(MultiIndex{static_cast<unsigned>(b)}, m);
    }
    c.supplied_moments = std::move(t);
    return c;
}

PathModel unit_interval_path_model(const UnitIntervalModel& model) {
    PathModel m;
    m.dim = 1;
    m.drift = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
    m.diffusion = [](std::span<const double> x, std::span<double> out) {
        out[0] = x[0] * (1.0 - x[0]) * (1.0 - x[0] / 2.0);
    };
    m.jumps.push_back({[](std::span<const double> x) {
                           return x[0] > 0.0 ? (1.0 - x[0]) * (1.0 - x[0] / 2.0) / x[0] : 0.0;
                       },
                       [](std::span<const double> x, std::span<double> out) { out[0] = -x[0]; }});
    m.box = Box{{0.0}, {1.0}};
    m.absorb_below = model.absorb_below;
    return m;
}

double unit_interval_generator_fk(int k, double x) {
    if (k < 2) return 0.0;
    auto f = [x](int j) { return std::pow(x / 2.0, j); };
    return (k + 2.0) * (k - 1.0) / 4.0 * (f(k - 1) + 2.0 * f(k + 1) - 3.0 * f(k));
}

}  // namespace holoseq
