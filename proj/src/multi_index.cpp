#include "holoseq/multi_index.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace holoseq {

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t i) {
    MultiIndex m = zero(dim);
    m.e_.at(i) = 1;
    return m;
}

unsigned MultiIndex::degree() const { return std::accumulate(e_.begin(), e_.end(), 0u); }

double MultiIndex::factorial() const {
    double f = 1.0;
    for (unsigned k : e_) f *= std::tgamma(static_cast<double>(k) + 1.0);
    return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
    if (!dominates(o)) throw std::invalid_argument("MultiIndex: negative difference");
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
}

bool MultiIndex::dominates(const MultiIndex& o) const {
    if (o.dim() != dim()) return false;
    for (std::size_t i = 0; i < e_.size(); ++i)
        if (o.e_[i] > e_[i]) return false;
    return true;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& o) const {
    if (auto c = dim() <=> o.dim(); c != 0) return c;
    if (auto c = degree() <=> o.degree(); c != 0) return c;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (e_[i] != o.e_[i]) return o.e_[i] <=> e_[i];
    }
    return std::strong_ordering::equal;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(e_[i]);
    }
    return s + ")";
}

double binomial(unsigned n, unsigned k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

namespace {

void enumerate_degree(std::size_t dim, unsigned k, std::vector<unsigned>& cur, std::size_t pos,
                      std::vector<unsigned>& out) {
    if (pos + 1 == dim) {
        cur[pos] = k;
        out.insert(out.end(), cur.begin(), cur.end());
        return;
    }
    for (unsigned first = k + 1; first-- > 0;) {
        cur[pos] = first;
        enumerate_degree(dim, k - first, cur, pos + 1, out);
    }
}

}  // namespace

IndexSpace::IndexSpace(std::size_t dim, int order) : dim_(dim), order_(order) {
    if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("IndexSpace: dimension must be in [1, 8]");
    if (order < 0 || order > kMaxOrder) throw std::invalid_argument("IndexSpace: order must be in [0, 170]");

    std::vector<double> fact(static_cast<std::size_t>(order) + 1, 1.0);
    for (int k = 1; k <= order; ++k) fact[k] = fact[k - 1] * k;

    std::vector<unsigned> cur(dim, 0);
    for (int k = 0; k <= order; ++k) {
        deg_begin_.push_back(exps_.size() / dim);
        enumerate_degree(dim, static_cast<unsigned>(k), cur, 0, exps_);
    }
    const std::size_t n = exps_.size() / dim;
    deg_begin_.push_back(n);

    degree_.resize(n);
    fact_.resize(n);
    inv_fact_.resize(n);
    lookup_.reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        auto e = exponents(idx);
        int deg = 0;
        double f = 1.0;
        for (unsigned v : e) {
            deg += static_cast<int>(v);
            f *= fact[v];
        }
        degree_[idx] = deg;
        fact_[idx] = f;
        inv_fact_[idx] = 1.0 / f;
        lookup_.emplace(key(e), idx);
    }
}

std::shared_ptr<const IndexSpace> IndexSpace::get(std::size_t dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, int>, std::shared_ptr<const IndexSpace>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::make_shared<const IndexSpace>(dim, order);
    return slot;
}

MultiIndex IndexSpace::multi_index(std::size_t idx) const {
    auto e = exponents(idx);
    return MultiIndex(std::vector<unsigned>(e.begin(), e.end()));
}

std::uint64_t IndexSpace::key(std::span<const unsigned> alpha) const {
    std::uint64_t k = 0;
    for (unsigned v : alpha) k = (k << 8) | (v & 0xFFu);
    return k;
}

std::size_t IndexSpace::index_of(std::span<const unsigned> alpha) const {
    if (alpha.size() != dim_) throw std::out_of_range("IndexSpace: dimension mismatch");
    unsigned deg = 0;
    for (unsigned v : alpha) deg += v;
    if (deg > static_cast<unsigned>(order_)) throw std::out_of_range("IndexSpace: degree exceeds order");
    return lookup_.at(key(alpha));
}

std::size_t IndexSpace::index_of_sum(std::size_t alpha, std::span<const unsigned> beta) const {
    auto a = exponents(alpha);
    int deg = 0;
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const unsigned s = a[i] + beta[i];
        deg += static_cast<int>(s);
        k = (k << 8) | (s & 0xFFu);
    }
    if (deg > order_) return npos;
    if (dim_ == 1) return static_cast<std::size_t>(deg);
    return lookup_.at(k);
}

const IndexSpace::Convolution& IndexSpace::convolution() const {
    std::call_once(conv_once_, [this] {
        const std::size_t n = size();
        conv_.start.assign(n + 1, 0);
        std::vector<unsigned> gamma(dim_);
        for (std::size_t a = 0; a < n; ++a) {
            conv_.start[a] = static_cast<std::uint32_t>(conv_.left.size());
            auto alpha = exponents(a);
            // beta runs over all indices dominated by alpha (degree <= |alpha|)
            const std::size_t end = deg_begin_[static_cast<std::size_t>(degree_[a]) + 1];
            for (std::size_t b = 0; b < end; ++b) {
                auto beta = exponents(b);
                bool ok = true;
                for (std::size_t i = 0; i < dim_; ++i) {
                    if (beta[i] > alpha[i]) {
                        ok = false;
                        break;
                    }
                    gamma[i] = alpha[i] - beta[i];
                }
                if (!ok) continue;
                double w = 1.0;
                for (std::size_t i = 0; i < dim_; ++i) w *= binomial(alpha[i], beta[i]);
                conv_.weight.push_back(w);
                conv_.left.push_back(static_cast<std::uint32_t>(b));
                conv_.right.push_back(static_cast<std::uint32_t>(lookup_.at(key(gamma))));
            }
        }
        conv_.start[n] = static_cast<std::uint32_t>(conv_.left.size());
    });
    return conv_;
}

}  // namespace holoseq
