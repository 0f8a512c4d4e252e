#include "holoseq/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holoseq/errors.hpp"
#include "holoseq/kernels.hpp"

namespace holoseq {

namespace {

// Neumaier compensated accumulator for one real component.
struct Compensated {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

bool all_zero(const CoeffSeries& u) {
    for (const cplx& c : u.coeffs())
        if (c != cplx(0.0)) return false;
    return true;
}

int clamp_trusted(long t, int order) {
    return static_cast<int>(std::clamp<long>(t, -1, order));
}

int mul_trusted(const CoeffSeries& u, const CoeffSeries& v) {
    const long tu = u.trusted_degree(), tv = v.trusted_degree();
    const long a = tu + v.valuation();
    const long b = tv + u.valuation();
    return clamp_trusted(std::min({static_cast<long>(u.order()), a, b}), u.order());
}

}  // namespace

// --- CoeffSeries ------------------------------------------------------------

CoeffSeries::CoeffSeries(std::size_t dim, int order)
    : space_(IndexSpace::get(dim, order)), coeffs_(space_->size()), trusted_(order) {}

CoeffSeries CoeffSeries::constant(std::size_t dim, int order, cplx c) {
    CoeffSeries s(dim, order);
    s.coeffs_[0] = c;
    return s;
}

CoeffSeries CoeffSeries::variable(std::size_t dim, int order, std::size_t i) {
    if (i >= dim) throw ValidationError("variable index out of range");
    CoeffSeries s(dim, order);
    if (order >= 1) s.set(MultiIndex::unit(dim, i), 1.0);
    return s;
}

CoeffSeries CoeffSeries::from_terms(std::size_t dim, int order,
                                    const std::vector<std::pair<MultiIndex, cplx>>& terms) {
    CoeffSeries s(dim, order);
    for (const auto& [alpha, v] : terms) {
        if (alpha.dim() != dim) throw ValidationError("term " + alpha.to_string() + " has wrong dimension");
        if (static_cast<int>(alpha.degree()) > order) continue;
        s.coeffs_[s.space_->index_of(alpha)] += v;
    }
    return s;
}

void CoeffSeries::set_trusted_degree(int t) {
    if (t < -1 || t > order()) throw ValidationError("trusted degree out of range");
    trusted_ = t;
}

cplx CoeffSeries::at(const MultiIndex& alpha) const {
    if (alpha.dim() != dim()) throw ValidationError("multi-index dimension mismatch");
    if (static_cast<int>(alpha.degree()) > order()) return 0.0;
    return coeffs_[space_->index_of(alpha)];
}

void CoeffSeries::set(const MultiIndex& alpha, cplx v) {
    if (alpha.dim() != dim()) throw ValidationError("multi-index dimension mismatch");
    coeffs_[space_->index_of(alpha)] = v;
}

CoeffSeries CoeffSeries::reordered(int new_order) const {
    CoeffSeries r(dim(), new_order);
    const std::size_t n = std::min(size(), r.size());  // prefix of graded order
    std::copy_n(coeffs_.begin(), n, r.coeffs_.begin());
    r.trusted_ = std::min(trusted_, new_order);
    return r;
}

int CoeffSeries::valuation() const {
    const std::size_t end = space_->degree_begin(trusted_ + 1);
    for (std::size_t i = 0; i < end; ++i)
        if (coeffs_[i] != cplx(0.0)) return space_->degree(i);
    return trusted_ + 1;
}

void CoeffSeries::check_shape(const CoeffSeries& o, const char* op) const {
    if (!same_shape(o)) {
        throw ValidationError(std::string(op) + ": dimension/order mismatch");
    }
}

CoeffSeries& CoeffSeries::operator+=(const CoeffSeries& o) { return add_scaled(1.0, o); }
CoeffSeries& CoeffSeries::operator-=(const CoeffSeries& o) { return add_scaled(-1.0, o); }

CoeffSeries& CoeffSeries::add_scaled(cplx a, const CoeffSeries& o) {
    check_shape(o, "linComb");
    kernels::active().axpy(a, o.coeffs_.data(), coeffs_.data(), coeffs_.size());
    trusted_ = std::min(trusted_, o.trusted_);
    return *this;
}

CoeffSeries& CoeffSeries::operator*=(cplx s) {
    for (cplx& c : coeffs_) c *= s;
    return *this;
}

bool CoeffSeries::operator==(const CoeffSeries& o) const {
    return same_shape(o) && trusted_ == o.trusted_ && coeffs_ == o.coeffs_;
}

// --- SeriesMatrix -----------------------------------------------------------

SeriesMatrix::SeriesMatrix(std::size_t dim, int order) : n_(dim), e_(dim * dim, CoeffSeries(dim, order)) {}

void SeriesMatrix::set(std::size_t i, std::size_t j, const CoeffSeries& s) {
    e_.at(i * n_ + j) = s;
    e_.at(j * n_ + i) = s;
}

bool SeriesMatrix::is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (!(e_[i * n_ + j] == e_[j * n_ + i])) return false;
    return true;
}

// --- operations -------------------------------------------------------------

CoeffSeries unit(std::size_t dim, int order) { return CoeffSeries::constant(dim, order, 1.0); }

CoeffSeries zero(std::size_t dim, int order) { return CoeffSeries(dim, order); }

CoeffSeries lin_comb(cplx a, const CoeffSeries& u, cplx b, const CoeffSeries& v) {
    CoeffSeries r = a * u;
    r.add_scaled(b, v);
    return r;
}

CoeffSeries mul(const CoeffSeries& u, const CoeffSeries& v) {
    if (!u.same_shape(v)) throw ValidationError("mul: dimension/order mismatch");
    const IndexSpace& sp = u.space();
    CoeffSeries out(u.dim(), u.order());
    out.set_trusted_degree(mul_trusted(u, v));
    if (all_zero(u) || all_zero(v)) return out;

    const auto& k = kernels::active();
    const auto& conv = sp.convolution();
    auto oc = out.coeffs();
    for (std::size_t a = 0; a < sp.size(); ++a) {
        const std::uint32_t s = conv.start[a], e = conv.start[a + 1];
        oc[a] = k.gather_dot(conv.weight.data() + s, u.coeffs().data(), v.coeffs().data(),
                             conv.left.data() + s, conv.right.data() + s, e - s);
    }
    return out;
}

CoeffSeries pow(const SeriesVector& u, const MultiIndex& beta) {
    if (u.empty() || beta.dim() != u.size()) throw ValidationError("pow: dimension mismatch");
    CoeffSeries r = unit(u[0].dim(), u[0].order());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (unsigned k = 0; k < beta[i]; ++k) r = mul(r, u[i]);
    return r;
}

CoeffSeries shift(const CoeffSeries& u, const MultiIndex& beta) {
    if (beta.dim() != u.dim()) throw ValidationError("shift: dimension mismatch");
    const int b = static_cast<int>(beta.degree());
    if (b > u.order()) throw ValidationError("shift: |beta| exceeds order");
    const IndexSpace& sp = u.space();
    CoeffSeries out(u.dim(), u.order());
    const std::size_t end = sp.degree_begin(u.order() - b + 1);
    for (std::size_t a = 0; a < end; ++a) out[a] = u[sp.index_of_sum(a, beta.exponents())];
    out.set_trusted_degree(std::max(-1, u.trusted_degree() - b));
    return out;
}

CoeffSeries exp_star(const CoeffSeries& u) {
    const IndexSpace& sp = u.space();
    const std::size_t n = sp.size(), d = sp.dim();
    const auto& k = kernels::active();
    CoeffSeries out(d, u.order());
    out.set_trusted_degree(u.trusted_degree());
    auto E = out.coeffs();
    E[0] = std::exp(u[0]);
    if (n == 1) return out;

    const auto& conv = sp.convolution();
    // du[i][gamma] = u_{gamma + e_i}
    std::vector<std::vector<cplx>> du(d, std::vector<cplx>(n, 0.0));
    std::vector<unsigned> ei(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        ei.assign(d, 0);
        ei[i] = 1;
        for (std::size_t g = 0; g < sp.degree_begin(u.order()); ++g) du[i][g] = u[sp.index_of_sum(g, ei)];
    }
    std::vector<unsigned> prev(d);
    for (std::size_t a = 1; a < n; ++a) {
        auto alpha = sp.exponents(a);
        std::size_t i = 0;
        while (alpha[i] == 0) ++i;
        std::copy(alpha.begin(), alpha.end(), prev.begin());
        prev[i] -= 1;
        const std::size_t p = sp.index_of(prev);
        const std::uint32_t s = conv.start[p], e = conv.start[p + 1];
        // entries of the table for `prev` only reference E at degree < |alpha|
        E[a] = k.gather_dot(conv.weight.data() + s, E.data(), du[i].data(), conv.left.data() + s,
                            conv.right.data() + s, e - s);
    }
    return out;
}

namespace {

CoeffSeries log_series(const CoeffSeries& c, cplx phi0, LogWeights weights) {
    const cplx c0 = c[0];
    CoeffSeries dser = (1.0 / c0) * c;
    dser[0] = 0.0;
    CoeffSeries psi = zero(c.dim(), c.order());
    CoeffSeries p = dser;
    double fact = 1.0;  // (k-1)!
    for (int k = 1; k <= c.order(); ++k) {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double w = weights == LogWeights::inverse_k ? sign / k : sign * fact;
        psi.add_scaled(w, p);
        fact *= k;
        if (k < c.order()) p = mul(p, dser);
    }
    psi[0] = phi0;
    return psi;
}

CoeffSeries log_recurrence(const CoeffSeries& c, cplx phi0) {
    const IndexSpace& sp = c.space();
    const std::size_t n = sp.size(), d = sp.dim();
    const auto& k = kernels::active();
    const auto& conv = sp.convolution();
    CoeffSeries psi(d, c.order());
    psi[0] = phi0;
    const cplx inv_c0 = 1.0 / c[0];
    // dpsi[i][gamma] = psi_{gamma + e_i}, filled as psi is computed
    std::vector<std::vector<cplx>> dpsi(d, std::vector<cplx>(n, 0.0));
    std::vector<unsigned> prev(d);
    for (std::size_t a = 1; a < n; ++a) {
        auto alpha = sp.exponents(a);
        std::size_t i = 0;
        while (alpha[i] == 0) ++i;
        std::copy(alpha.begin(), alpha.end(), prev.begin());
        prev[i] -= 1;
        const std::size_t p = sp.index_of(prev);
        const std::uint32_t s = conv.start[p], e = conv.start[p + 1];
        // the beta = 0 entry meets dpsi[i][p] == 0, so this sums beta != 0 only
        const cplx rest = k.gather_dot(conv.weight.data() + s, c.coeffs().data(), dpsi[i].data(),
                                       conv.left.data() + s, conv.right.data() + s, e - s);
        psi[a] = (c[a] - rest) * inv_c0;
        for (std::size_t j = 0; j < d; ++j) {
            if (alpha[j] == 0) continue;
            std::copy(alpha.begin(), alpha.end(), prev.begin());
            prev[j] -= 1;
            dpsi[j][sp.index_of(prev)] = psi[a];
        }
    }
    return psi;
}

}  // namespace

CoeffSeries log_star(const CoeffSeries& c, cplx phi0, const LogOptions& opt) {
    if (std::abs(c[0]) <= opt.eps_div) {
        throw VanishingCoefficientError("logStar: |c_0| below threshold", 0.0);
    }
    CoeffSeries psi = opt.method == LogMethod::recurrence ? log_recurrence(c, phi0)
                                                          : log_series(c, phi0, opt.weights);
    psi.set_trusted_degree(c.trusted_degree());
    return psi;
}

ComposePlan make_compose_plan(const SeriesVector& v) {
    if (v.empty()) throw ValidationError("composeShift: empty shift vector");
    const std::size_t d = v.size();
    for (const auto& vi : v)
        if (vi.dim() != d || !vi.same_shape(v[0])) throw ValidationError("composeShift: dimension/order mismatch");
    const IndexSpace& sp = v[0].space();
    ComposePlan plan{v, {}};
    plan.powers.reserve(sp.size());
    plan.powers.push_back(unit(d, v[0].order()));
    std::vector<unsigned> prev(d);
    for (std::size_t b = 1; b < sp.size(); ++b) {
        auto beta = sp.exponents(b);
        std::size_t i = 0;
        while (beta[i] == 0) ++i;
        std::copy(beta.begin(), beta.end(), prev.begin());
        prev[i] -= 1;
        plan.powers.push_back(mul(plan.powers[sp.index_of(prev)], v[i]));
    }
    return plan;
}

CoeffSeries compose_shift(const CoeffSeries& u, const ComposePlan& plan) {
    if (plan.v.size() != u.dim() || !u.same_shape(plan.v[0]))
        throw ValidationError("composeShift: dimension/order mismatch");
    const IndexSpace& sp = u.space();
    CoeffSeries out = zero(u.dim(), u.order());
    out.set_trusted_degree(u.trusted_degree());
    for (std::size_t b = 0; b < sp.size(); ++b) {
        const CoeffSeries s = shift(u, sp.multi_index(b));
        out.add_scaled(sp.inv_factorial(b), mul(s, plan.powers[b]));
    }
    return out;
}

CoeffSeries compose_shift(const CoeffSeries& u, const SeriesVector& v) {
    if (v.size() != u.dim()) throw ValidationError("composeShift: need one series per coordinate");
    return compose_shift(u, make_compose_plan(v));
}

namespace {

template <class T>
std::vector<std::vector<T>> monomial_table(std::span<const T> z, int order) {
    std::vector<std::vector<T>> t(z.size(), std::vector<T>(static_cast<std::size_t>(order) + 1));
    for (std::size_t i = 0; i < z.size(); ++i) {
        t[i][0] = T(1.0);
        for (int k = 1; k <= order; ++k) t[i][k] = t[i][k - 1] * z[i] / static_cast<double>(k);
    }
    return t;
}

}  // namespace

cplx eval(const CoeffSeries& u, std::span<const cplx> z) {
    if (z.size() != u.dim()) throw ValidationError("eval: point dimension mismatch");
    const IndexSpace& sp = u.space();
    const auto tab = monomial_table<cplx>(z, u.order());
    Compensated re, im;
    for (std::size_t a = 0; a < sp.size(); ++a) {
        if (u[a] == cplx(0.0)) continue;
        auto alpha = sp.exponents(a);
        cplx m = 1.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) m *= tab[i][alpha[i]];
        const cplx term = u[a] * m;
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

cplx eval(const CoeffSeries& u, std::span<const double> x) {
    std::vector<cplx> z(x.begin(), x.end());
    return eval(u, std::span<const cplx>(z));
}

cplx eval(const CoeffSeries& u, std::initializer_list<double> x) {
    std::vector<cplx> z(x.begin(), x.end());
    return eval(u, std::span<const cplx>(z));
}

double abs_norm_range(const CoeffSeries& u, std::span<const double> r, int lo, int hi) {
    if (r.size() != u.dim()) throw ValidationError("absNorm: radius dimension mismatch");
    for (double ri : r)
        if (ri < 0.0) throw ValidationError("absNorm: negative radius");
    const IndexSpace& sp = u.space();
    lo = std::max(lo, 0);
    hi = std::min(hi, u.order());
    if (lo > hi) return 0.0;
    const auto tab = monomial_table<double>(r, u.order());
    Compensated acc;
    for (std::size_t a = sp.degree_begin(lo); a < sp.degree_begin(hi + 1); ++a) {
        auto alpha = sp.exponents(a);
        double m = 1.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) m *= tab[i][alpha[i]];
        acc.add(std::abs(u[a]) * m);
    }
    return acc.value();
}

double abs_norm(const CoeffSeries& u, std::span<const double> r) {
    return abs_norm_range(u, r, 0, u.order());
}

double abs_norm(const CoeffSeries& u, double r) {
    std::vector<double> rv(u.dim(), r);
    return abs_norm(u, rv);
}

double trusted_distance(const CoeffSeries& u, const CoeffSeries& v, double r, int deg) {
    CoeffSeries diff = u - v;
    std::vector<double> rv(u.dim(), r);
    return abs_norm_range(diff, rv, 0, deg);
}

}  // namespace holoseq
