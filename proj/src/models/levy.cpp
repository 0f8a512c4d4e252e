#include "holoseq/models/levy.hpp"

#include <cmath>

#include "holoseq/errors.hpp"

namespace holoseq {

void LevySpec::validate() const {
    if (!std::isfinite(b)) throw ValidationError("levy: b must be finite");
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("levy: a must be >= 0");
    for (const auto& at : atoms) {
        if (!(at.weight >= 0.0) || !std::isfinite(at.weight)) throw ValidationError("levy: weights must be >= 0");
        if (!std::isfinite(at.jump)) throw ValidationError("levy: jump values must be finite");
    }
}

cplx levy_exponent(const LevySpec& spec, cplx tau) {
    cplx s = spec.b * tau + 0.5 * spec.a * tau * tau;
    for (const auto& at : spec.atoms) {
        const cplx ty = tau * at.jump;
        s += at.weight * (std::exp(ty) - 1.0 - ty);
    }
    return s;
}

Characteristics levy_characteristics(const LevySpec& spec, int order) {
    spec.validate();
    if (order < 2) throw ValidationError("levy: order must be >= 2");
    Characteristics c(1, order);
    c.drift[0] = CoeffSeries::constant(1, order, spec.b);
    c.diffusion.set(0, 0, CoeffSeries::constant(1, order, spec.a));
    if (!spec.atoms.empty()) {
        JumpKernel k{unit(1, order), {}};
        for (const auto& at : spec.atoms) k.atoms.push_back({at.weight, {CoeffSeries::constant(1, order, at.jump)}});
        c.kernels.push_back(std::move(k));
    }
    return c;
}

}  // namespace holoseq
