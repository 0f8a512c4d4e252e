#include "holoseq/models/chain.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "holoseq/errors.hpp"

namespace holoseq {

void FiniteChain::validate() const {
    const std::size_t n = size();
    if (n == 0) throw ValidationError("chain: no states");
    if (static_cast<std::size_t>(rates.rows()) != n || static_cast<std::size_t>(rates.cols()) != n)
        throw ValidationError("chain: rate matrix must be N x N");
    for (std::size_t i = 0; i < n; ++i) {
        if (states[i].size() != dim() || dim() == 0) throw ValidationError("chain: states need a common dimension");
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && (!(rates(i, j) >= 0.0) || !std::isfinite(rates(i, j))))
                throw ValidationError("chain: rates must be finite and >= 0");
            if (i < j && states[i] == states[j]) throw ValidationError("chain: states must be distinct");
        }
    }
}

std::size_t FiniteChain::state_index(std::span<const double> x) const {
    for (std::size_t i = 0; i < size(); ++i)
        if (std::equal(x.begin(), x.end(), states[i].begin(), states[i].end())) return i;
    throw ValidationError("chain: x0 is not a state");
}

Eigen::MatrixXd chain_generator(const FiniteChain& chain) {
    chain.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(chain.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            L(i, j) += chain.rates(i, j);
            L(i, i) -= chain.rates(i, j);
        }
    }
    return L;
}

Eigen::MatrixXd chain_transition(const FiniteChain& chain, double T) {
    if (!(T >= 0.0)) throw ValidationError("chain: T must be >= 0");
    Eigen::MatrixXd L = chain_generator(chain) * T;
    return L.exp();
}

cplx chain_expectation(const FiniteChain& chain, const std::vector<cplx>& h, double T, std::span<const double> x0) {
    if (h.size() != chain.size()) throw ValidationError("chain: need one value per state");
    const std::size_t i0 = chain.state_index(x0);
    if (T == 0.0) return h[i0];
    const Eigen::MatrixXd P = chain_transition(chain, T);
    cplx s = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) s += P(i0, k) * h[k];
    return s;
}

SeriesVector lagrange_indicators(const FiniteChain& chain, int order) {
    chain.validate();
    if (chain.dim() != 1) throw ValidationError("chain: Lagrange indicators need d = 1");
    const std::size_t n = chain.size();
    if (order < static_cast<int>(n) - 1) throw ValidationError("chain: order must be >= N - 1");
    SeriesVector v;
    for (std::size_t i = 0; i < n; ++i) {
        CoeffSeries p = unit(1, order);
        const double xi = chain.states[i][0];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double xj = chain.states[j][0];
            CoeffSeries f = zero(1, order);
            f[0] = -xj / (xi - xj);
            if (order >= 1) f[1] = 1.0 / (xi - xj);
            p = mul(p, f);
        }
        v.push_back(std::move(p));
    }
    return v;
}

CoeffSeries chain_expectation_series(const FiniteChain& chain, const std::vector<cplx>& h, double T, int order) {
    if (h.size() != chain.size()) throw ValidationError("chain: need one value per state");
    if (!(T >= 0.0)) throw ValidationError("chain: T must be >= 0");
    const SeriesVector v = lagrange_indicators(chain, order);
    const Eigen::MatrixXd G = chain_generator(chain);
    Eigen::VectorXcd w(static_cast<Eigen::Index>(h.size()));
    for (std::size_t k = 0; k < h.size(); ++k) w[static_cast<Eigen::Index>(k)] = h[k];
    if (T > 0.0) {
        // coordinates of c(t) in the basis v^i: w' = L~ w
        OdeConfig cfg;
        cfg.t_end = T;
        cfg.rel_tol = 1e-13;
        cfg.abs_tol = 1e-15;
        auto rhs = [&G](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return G * y; };
        auto norm = [](const Eigen::VectorXcd& y) { return y.cwiseAbs().maxCoeff(); };
        w = integrate_rk45(rhs, w, cfg, norm).states.back();
    }
    CoeffSeries c = zero(1, order);
    for (std::size_t i = 0; i < chain.size(); ++i) c.add_scaled(w[static_cast<Eigen::Index>(i)], v[i]);
    return c;
}

Characteristics chain_characteristics(const FiniteChain& chain, int order) {
    const SeriesVector v = lagrange_indicators(chain, order);
    Characteristics c(1, order);
    c.drift[0] = zero(1, order);
    c.diffusion.set(0, 0, zero(1, order));
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t j = 0; j < chain.size(); ++j) {
            const double lam = chain.rates(i, j);
            if (i == j || lam == 0.0) continue;
            CoeffSeries size = zero(1, order);
            size[0] = chain.states[j][0];
            if (order >= 1) size[1] = -1.0;
            CoeffSeries intensity = cplx(lam) * v[i];
            c.drift[0] += mul(intensity, size);
            c.kernels.push_back({intensity, {{1.0, {size}}}});
        }
    }
    return c;
}

PathModel chain_path_model(const FiniteChain& chain) {
    chain.validate();
    const std::size_t d = chain.dim();
    auto nearest = [chain](std::span<const double> x) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < chain.size(); ++i) {
            double dist = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) dist = std::max(dist, std::abs(x[k] - chain.states[i][k]));
            if (dist <= 1e-9) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
    };
    PathModel m;
    m.dim = d;
    m.diffusion = [d](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.begin() + d * d, 0.0); };
    // drift cancels the compensator of the jump channels
    m.drift = [chain, nearest, d](std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.begin() + d, 0.0);
        const auto i = nearest(x);
        if (i < 0) return;
        for (std::size_t j = 0; j < chain.size(); ++j) {
            if (static_cast<std::size_t>(i) == j) continue;
            for (std::size_t k = 0; k < d; ++k) out[k] += chain.rates(i, j) * (chain.states[j][k] - x[k]);
        }
    };
    for (std::size_t j = 0; j < chain.size(); ++j) {
        m.jumps.push_back({[chain, nearest, j](std::span<const double> x) {
                               const auto i = nearest(x);
                               return i < 0 || static_cast<std::size_t>(i) == j ? 0.0 : chain.rates(i, j);
                           },
                           [chain, j](std::span<const double> x, std::span<double> out) {
                               for (std::size_t k = 0; k < x.size(); ++k) out[k] = chain.states[j][k] - x[k];
                           }});
    }
    return m;
}

ChainAffineFlow chain_affine_flow(const FiniteChain& chain, const Eigen::VectorXcd& u, const OdeConfig& cfg) {
    chain.validate();
    cfg.validate();
    const std::size_t n = chain.size();
    if (static_cast<std::size_t>(u.size()) != n) throw ValidationError("chain: need one u per state");
    auto rhs = [&](double, const Eigen::VectorXcd& psi) {
        Eigen::VectorXcd d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && chain.rates(i, j) != 0.0)
                    d[i] += chain.rates(i, j) * (std::exp(psi[j] - psi[i]) - 1.0);
        return d;
    };
    auto norm = [](const Eigen::VectorXcd& y) { return y.cwiseAbs().maxCoeff(); };
    OdeTrajectory<Eigen::VectorXcd> tr = cfg.method == OdeMethod::rk4 ? integrate_rk4(rhs, u, cfg.t_end, cfg.step)
                                                                      : integrate_rk45(rhs, u, cfg, norm);
    return {std::move(tr.times), std::move(tr.states)};
}

Eigen::VectorXcd chain_affine_log_route(const FiniteChain& chain, const Eigen::VectorXcd& u, double T,
                                        double eps_div) {
    const Eigen::MatrixXd P = chain_transition(chain, T);
    Eigen::VectorXcd c = P * u.array().exp().matrix();
    Eigen::VectorXcd psi(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(std::abs(c[i]) > eps_div))
            throw VanishingCoefficientError("chain: c(T)_i below threshold at t = " + std::to_string(T), T);
        psi[i] = std::log(c[i]);
    }
    return psi;
}

Eigen::Vector2cd two_state_affine(double l12, double l21, cplx u1, cplx u2, double t) {
    const double s = l12 + l21;
    const cplx e1 = std::exp(u1), e2 = std::exp(u2);
    const cplx stat = (l21 * e1 + l12 * e2) / s;
    const double decay = std::exp(-s * t);
    return {std::log(l12 / s * (e1 - e2) * decay + stat), std::log(-l21 / s * (e1 - e2) * decay + stat)};
}

}  // namespace holoseq
