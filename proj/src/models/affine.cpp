#include "holoseq/models/affine.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "holoseq/errors.hpp"

namespace holoseq {

std::vector<MergedAtom> merged_atoms(const AffineSpec& spec) {
    std::vector<MergedAtom> out;
    auto add = [&](double jump, double w0, double w1) {
        for (auto& m : out) {
            if (m.jump == jump) {
                m.w0 += w0;
                m.w1 += w1;
                return;
            }
        }
        out.push_back({jump, w0, w1});
    };
    for (const auto& a : spec.nu0) add(a.jump, a.weight, 0.0);
    for (const auto& a : spec.nu1) add(a.jump, 0.0, a.weight);
    return out;
}

void AffineSpec::validate() const {
    for (double v : {b0, b1, a0, a1, lo, hi})
        if (!std::isfinite(v)) throw ValidationError("affine: parameters must be finite");
    if (!(lo <= hi)) throw ValidationError("affine: empty state interval");
    for (const auto* nu : {&nu0, &nu1})
        for (const auto& a : *nu)
            if (!std::isfinite(a.weight) || !std::isfinite(a.jump)) throw ValidationError("affine: atoms must be finite");
    const auto atoms = merged_atoms(*this);
    for (int k = 0; k <= 100; ++k) {
        const double x = lo + (hi - lo) * k / 100.0;
        if (a0 + a1 * x < -1e-14) throw ValidationError("affine: a(x) < 0 at x = " + std::to_string(x));
        for (const auto& m : atoms)
            if (m.w0 + m.w1 * x < -1e-14)
                throw ValidationError("affine: nu0 + x nu1 negative at x = " + std::to_string(x));
    }
}

Characteristics affine_characteristics(const AffineSpec& spec, int order) {
    spec.validate();
    if (order < 2) throw ValidationError("affine: order must be >= 2");
    Characteristics c(1, order);
    CoeffSeries b = CoeffSeries::constant(1, order, spec.b0);
    b[1] = spec.b1;
    CoeffSeries a = CoeffSeries::constant(1, order, spec.a0);
    a[1] = spec.a1;
    c.drift[0] = b;
    c.diffusion.set(0, 0, a);
    for (const auto& m : merged_atoms(spec)) {
        if (m.w0 == 0.0 && m.w1 == 0.0) continue;
        CoeffSeries lam = CoeffSeries::constant(1, order, m.w0);
        lam[1] = m.w1;
        c.kernels.push_back({lam, {{1.0, {CoeffSeries::constant(1, order, m.jump)}}}});
    }
    return c;
}

AffineExponents affine_transform(const AffineSpec& spec, cplx u, double T, double rel_tol) {
    spec.validate();
    using V = Eigen::Vector2cd;
    auto jumps = [](const std::vector<LevyAtom>& nu, cplx p) {
        cplx s = 0.0;
        for (const auto& a : nu) s += a.weight * (std::exp(p * a.jump) - 1.0 - p * a.jump);
        return s;
    };
    auto rhs = [&](double, const V& y) {
        const cplx p = y[1];
        V d;
        d[0] = spec.b0 * p + 0.5 * spec.a0 * p * p + jumps(spec.nu0, p);
        d[1] = spec.b1 * p + 0.5 * spec.a1 * p * p + jumps(spec.nu1, p);
        return d;
    };
    V y0(0.0, u);
    if (T == 0.0) return {0.0, u};
    OdeConfig cfg;
    cfg.t_end = T;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = 1e-15;
    auto norm = [](const V& y) { return y.cwiseAbs().maxCoeff(); };
    auto tr = integrate_rk45(rhs, y0, cfg, norm);
    return {tr.states.back()[0], tr.states.back()[1]};
}

}  // namespace holoseq
