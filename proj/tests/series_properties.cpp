#include "series_properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holoseq/series.hpp"

namespace holoseq::testing {
namespace {

struct Gen {
    std::mt19937_64 g;
    explicit Gen(unsigned long long seed) : g(seed) {}

    double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
    cplx c(double s) { return {uni(-s, s), uni(-s, s)}; }

    std::size_t dim() { return static_cast<std::size_t>(integer(1, 3)); }
    int order(std::size_t d) { return d == 1 ? integer(4, 16) : (d == 2 ? integer(3, 9) : integer(2, 6)); }

    CoeffSeries decaying(std::size_t d, int N, double scale = 1.0) {
        CoeffSeries u(d, N);
        const double r = uni(0.3, 0.9);
        for (std::size_t a = 0; a < u.size(); ++a)
            u[a] = c(scale) * std::pow(r, u.space().degree(a)) * u.space().factorial(a);
        return u;
    }
    CoeffSeries integer_series(std::size_t d, int N) {
        CoeffSeries u(d, N);
        for (std::size_t a = 0; a < u.size(); ++a) u[a] = cplx(integer(-3, 3), integer(-3, 3));
        return u;
    }
    CoeffSeries poly(std::size_t d, int N, int deg, double scale) {
        CoeffSeries u(d, N);
        for (std::size_t a = 0; a < u.size() && u.space().degree(a) <= deg; ++a)
            u[a] = c(scale) * u.space().factorial(a);
        return u;
    }
};

CoeffSeries abs_series(const CoeffSeries& u) {
    CoeffSeries r = u;
    for (std::size_t a = 0; a < r.size(); ++a) r[a] = std::abs(u[a]);
    return r;
}

// max_alpha |x - y| / max(tiny, scale_alpha) over degrees <= deg
double scaled_diff(const CoeffSeries& x, const CoeffSeries& y, const CoeffSeries& scale, int deg) {
    double m = 0.0;
    const std::size_t end = x.space().degree_begin(std::max(deg, -1) + 1);
    for (std::size_t a = 0; a < end; ++a) {
        const double s = std::max(std::abs(scale[a]), 1e-300);
        m = std::max(m, std::abs(x[a] - y[a]) / s);
    }
    return m;
}

double exact_diff(const CoeffSeries& x, const CoeffSeries& y) {
    double m = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) m = std::max(m, std::abs(x[a] - y[a]));
    return m;
}

double point_rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<PropertyResult> run_series_properties(int cases, unsigned long long seed) {
    Gen gen(seed);
    std::vector<PropertyResult> out;

    {
        PropertyResult r{"mul commutative/associative (integer inputs, exact)", cases, 0.0, 0.0};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = std::min(gen.order(d), 8);
            const CoeffSeries u = gen.integer_series(d, N), v = gen.integer_series(d, N),
                              w = gen.integer_series(d, N);
            r.worst = std::max({r.worst, exact_diff(mul(u, v), mul(v, u)),
                                exact_diff(mul(mul(u, v), w), mul(u, mul(v, w)))});
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"mul commutative/associative (float inputs)", cases, 0.0, 1e-12};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = gen.order(d);
            const CoeffSeries u = gen.decaying(d, N), v = gen.decaying(d, N), w = gen.decaying(d, N);
            const CoeffSeries scale = mul(mul(abs_series(u), abs_series(v)), abs_series(w));
            const CoeffSeries scale2 = mul(abs_series(u), abs_series(v));
            r.worst = std::max({r.worst, scaled_diff(mul(u, v), mul(v, u), scale2, N),
                                scaled_diff(mul(mul(u, v), w), mul(u, mul(v, w)), scale, N)});
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"Leibniz rule for shift by e_i", cases, 0.0, 1e-12};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = gen.order(d);
            const CoeffSeries u = gen.decaying(d, N), v = gen.decaying(d, N);
            const MultiIndex e = MultiIndex::unit(d, static_cast<std::size_t>(gen.integer(0, int(d) - 1)));
            const CoeffSeries lhs = shift(mul(u, v), e);
            const CoeffSeries rhs = mul(shift(u, e), v) + mul(u, shift(v, e));
            const CoeffSeries scale = shift(mul(abs_series(u), abs_series(v)), e);
            r.worst = std::max(r.worst, scaled_diff(lhs, rhs, scale, std::min(lhs.trusted_degree(), rhs.trusted_degree())));
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"expStar homomorphism", cases, 0.0, 1e-12};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = gen.order(d);
            const CoeffSeries u = gen.decaying(d, N, 0.5), v = gen.decaying(d, N, 0.5);
            const CoeffSeries lhs = exp_star(u + v);
            const CoeffSeries rhs = mul(exp_star(u), exp_star(v));
            const CoeffSeries scale = mul(exp_star(abs_series(u)), exp_star(abs_series(v)));
            r.worst = std::max(r.worst, scaled_diff(lhs, rhs, scale, N));
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"expStar/logStar round trip (absolute, |u_alpha| <= 0.25, N <= 12)", cases, 0.0, 1e-12};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = std::min(gen.order(d), d == 1 ? 12 : 8);
            CoeffSeries u(d, N);
            for (std::size_t a = 0; a < u.size(); ++a) u[a] = gen.c(0.25);
            const CoeffSeries back = log_star(exp_star(u), u[0]);
            r.worst = std::max(r.worst, exact_diff(back, u));
            const CoeffSeries c = exp_star(u);
            const CoeffSeries c2 = exp_star(log_star(c, std::log(c[0])));
            r.worst = std::max(r.worst, scaled_diff(c2, c, exp_star(abs_series(u)), N));
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"composeShift vs direct evaluation", cases, 0.0, 1e-10};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = d == 1 ? 12 : (d == 2 ? 9 : 9);
            const CoeffSeries u = gen.poly(d, N, 3, 1.0);
            SeriesVector v;
            for (std::size_t k = 0; k < d; ++k) v.push_back(gen.poly(d, N, 3, 0.5));
            const CoeffSeries comp = compose_shift(u, v);
            std::vector<double> x(d);
            for (auto& xi : x) xi = gen.uni(-1.0, 1.0);
            std::vector<cplx> y(d);
            for (std::size_t k = 0; k < d; ++k) y[k] = x[k] + eval(v[k], std::span<const double>(x));
            r.worst = std::max(r.worst, point_rel(eval(comp, std::span<const double>(x)), eval(u, std::span<const cplx>(y))));
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"eval-mul homomorphism", cases, 0.0, 1e-12};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = 8;
            const CoeffSeries u = gen.poly(d, N, 3, 1.0), v = gen.poly(d, N, 3, 1.0);
            std::vector<cplx> z(d);
            for (auto& zi : z) zi = gen.c(1.0);
            const cplx lhs = eval(mul(u, v), std::span<const cplx>(z));
            const cplx rhs = eval(u, std::span<const cplx>(z)) * eval(v, std::span<const cplx>(z));
            r.worst = std::max(r.worst, point_rel(lhs, rhs));
        }
        out.push_back(r);
    }
    {
        PropertyResult r{"eval-linComb homomorphism", cases, 0.0, 1e-13};
        for (int i = 0; i < cases; ++i) {
            const std::size_t d = gen.dim();
            const int N = gen.order(d);
            const CoeffSeries u = gen.decaying(d, N), v = gen.decaying(d, N);
            const cplx a = gen.c(2.0), b = gen.c(2.0);
            std::vector<cplx> z(d);
            for (auto& zi : z) zi = gen.c(1.0);
            const cplx lhs = eval(lin_comb(a, u, b, v), std::span<const cplx>(z));
            const cplx rhs = a * eval(u, std::span<const cplx>(z)) + b * eval(v, std::span<const cplx>(z));
            const double scale = std::abs(a) * abs_norm(u, 1.0) + std::abs(b) * abs_norm(v, 1.0);
            r.worst = std::max(r.worst, std::abs(lhs - rhs) / std::max(1.0, scale));
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace holoseq::testing
