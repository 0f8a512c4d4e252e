#pragma once

// Shared helpers for the test binaries: seeded random inputs and naive
// reference implementations that do not go through the optimized paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "holoseq/series.hpp"

namespace holoseq::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611ULL);
    return g;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cplx random_cplx(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

/// Random series whose coefficients vanish above max_degree. Scaled by
/// alpha! so that the represented polynomial has O(scale) Taylor coefficients.
inline CoeffSeries random_poly(std::size_t dim, int order, int max_degree, double scale = 1.0,
                               bool real = false) {
    CoeffSeries u(dim, order);
    const IndexSpace& sp = u.space();
    for (std::size_t a = 0; a < sp.size(); ++a) {
        if (sp.degree(a) > max_degree) break;
        cplx c = random_cplx(scale);
        if (real) c = c.real();
        u[a] = c * sp.factorial(a);
    }
    return u;
}

/// Random series with geometrically decaying Taylor coefficients.
inline CoeffSeries random_series(std::size_t dim, int order, double scale, double decay) {
    CoeffSeries u(dim, order);
    const IndexSpace& sp = u.space();
    for (std::size_t a = 0; a < sp.size(); ++a) {
        u[a] = random_cplx(scale) * std::pow(decay, sp.degree(a)) * sp.factorial(a);
    }
    return u;
}

/// Integer-valued random series (exactly representable products).
inline CoeffSeries random_integer_series(std::size_t dim, int order, int max_abs) {
    CoeffSeries u(dim, order);
    std::uniform_int_distribution<int> dist(-max_abs, max_abs);
    for (std::size_t a = 0; a < u.size(); ++a) u[a] = cplx(dist(rng()), dist(rng()));
    return u;
}

/// Direct double loop over (beta, gamma) with beta + gamma = alpha.
inline CoeffSeries naive_mul(const CoeffSeries& u, const CoeffSeries& v) {
    const IndexSpace& sp = u.space();
    CoeffSeries out(u.dim(), u.order());
    for (std::size_t a = 0; a < sp.size(); ++a) {
        const MultiIndex alpha = sp.multi_index(a);
        cplx acc = 0.0;
        for (std::size_t b = 0; b < sp.size(); ++b) {
            const MultiIndex beta = sp.multi_index(b);
            if (!alpha.dominates(beta)) continue;
            const MultiIndex gamma = alpha - beta;
            const double w = alpha.factorial() / (beta.factorial() * gamma.factorial());
            acc += w * u.at(beta) * v.at(gamma);
        }
        out[a] = acc;
    }
    return out;
}

inline double max_abs_diff(const CoeffSeries& u, const CoeffSeries& v, int max_degree) {
    const IndexSpace& sp = u.space();
    double m = 0.0;
    for (std::size_t a = 0; a < sp.degree_begin(max_degree + 1); ++a) m = std::max(m, std::abs(u[a] - v[a]));
    return m;
}

/// max_alpha |u - v| / max(1, |v|) over degrees <= max_degree.
inline double max_rel_diff(const CoeffSeries& u, const CoeffSeries& v, int max_degree) {
    const IndexSpace& sp = u.space();
    double m = 0.0;
    for (std::size_t a = 0; a < sp.degree_begin(max_degree + 1); ++a)
        m = std::max(m, std::abs(u[a] - v[a]) / std::max(1.0, std::abs(v[a])));
    return m;
}

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace holoseq::testing
