#include "holoseq/generator.hpp"

#include "holoseq/errors.hpp"

namespace holoseq {

GeneratorConfig default_generator_config(const Characteristics& chr, int working_order, int buffer) {
    GeneratorConfig cfg;
    cfg.form = (chr.has_jumps() && !chr.has_kernel()) ? GeneratorForm::moment : GeneratorForm::composition;
    cfg.working_order = working_order;
    cfg.buffer = buffer;
    cfg.b_max = std::max(2, working_order);
    return cfg;
}

LinearOperator::LinearOperator(std::shared_ptr<const Characteristics> chr, GeneratorConfig cfg)
    : chr_(std::move(chr)), cfg_(cfg) {
    if (!chr_) throw ValidationError("generator: null characteristics");
    chr_->validate();
    if (cfg_.b_max < 2) throw ValidationError("generator: B_max must be >= 2");
    if (cfg_.buffer < 2) throw ValidationError("generator: buffer must be >= 2");
    if (cfg_.working_order < 0) throw ValidationError("generator: working order must be >= 0");
    if (cfg_.internal_order() != chr_->order()) {
        throw ValidationError("generator: characteristics order " + std::to_string(chr_->order()) +
                              " != working order + buffer " + std::to_string(cfg_.internal_order()));
    }
    if (cfg_.form == GeneratorForm::composition && chr_->has_jumps() && !chr_->has_kernel()) {
        throw ValidationError("generator: composition form needs series jump sizes");
    }
    for (const auto& k : chr_->kernels) {
        KernelPlan kp{k.intensity, {}};
        for (const auto& a : k.atoms) kp.atoms.push_back({a.weight, make_compose_plan(a.jump_size)});
        kernel_plans_.push_back(std::move(kp));
    }
    if (chr_->has_jumps()) moments_ = build_moment_table(*chr_, cfg_.b_max);
}

void LinearOperator::check_input(const CoeffSeries& u) const {
    if (u.empty() || u.dim() != dim() || u.order() != order()) {
        throw ValidationError("generator: input series has mismatched dim/order");
    }
    if (order() < 2) throw ValidationError("generator: order too small for the diffusion term");
}

CoeffSeries LinearOperator::drift_diffusion(const CoeffSeries& u, bool with_moments) const {
    const std::size_t d = dim();
    const Characteristics& c = *chr_;
    CoeffSeries out = zero(d, order());
    for (std::size_t i = 0; i < d; ++i) out += mul(shift(u, MultiIndex::unit(d, i)), c.drift[i]);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            MultiIndex beta = MultiIndex::zero(d);
            beta[i] += 1;
            beta[j] += 1;
            CoeffSeries coef = c.diffusion(i, j);
            if (with_moments)
                if (const CoeffSeries* m = moments_.find(beta)) coef += *m;
            out.add_scaled(1.0 / beta.factorial(), mul(shift(u, beta), coef));
        }
    }
    return out;
}

CoeffSeries LinearOperator::apply_moment(const CoeffSeries& u) const {
    check_input(u);
    CoeffSeries out = drift_diffusion(u, true);
    for (const auto& [beta, m] : moments_.entries()) {
        if (beta.degree() < 3 || static_cast<int>(beta.degree()) > cfg_.b_max) continue;
        out.add_scaled(1.0 / beta.factorial(), mul(shift(u, beta), m));
    }
    return out;
}

CoeffSeries LinearOperator::apply_composition(const CoeffSeries& u) const {
    check_input(u);
    if (chr_->has_jumps() && !chr_->has_kernel()) {
        throw ValidationError("generator: composition form needs series jump sizes");
    }
    const std::size_t d = dim();
    CoeffSeries out = drift_diffusion(u, false);
    if (kernel_plans_.empty()) return out;
    std::vector<CoeffSeries> grad;
    for (std::size_t i = 0; i < d; ++i) grad.push_back(shift(u, MultiIndex::unit(d, i)));
    for (const auto& kp : kernel_plans_) {
        CoeffSeries inner = zero(d, order());
        for (const auto& ap : kp.atoms) {
            CoeffSeries t = compose_shift(u, ap.plan) - u;
            for (std::size_t i = 0; i < d; ++i) t -= mul(grad[i], ap.plan.v[i]);
            inner.add_scaled(ap.weight, t);
        }
        out += mul(kp.intensity, inner);
    }
    return out;
}

CoeffSeries LinearOperator::apply(const CoeffSeries& u) const {
    return cfg_.form == GeneratorForm::moment ? apply_moment(u) : apply_composition(u);
}

CoeffSeries LinearOperator::jump_exponential_term(const CoeffSeries& u) const {
    check_input(u);
    const std::size_t d = dim();
    CoeffSeries out = zero(d, order());
    const CoeffSeries one = unit(d, order());
    for (const auto& kp : kernel_plans_) {
        CoeffSeries inner = zero(d, order());
        for (const auto& ap : kp.atoms) {
            const CoeffSeries delta = compose_shift(u, ap.plan) - u;
            inner.add_scaled(ap.weight, exp_star(delta) - one - delta);
        }
        out += mul(kp.intensity, inner);
    }
    return out;
}

RiccatiOperator::RiccatiOperator(std::shared_ptr<const LinearOperator> l) : l_(std::move(l)) {
    if (!l_) throw ValidationError("riccati: null linear operator");
}

RiccatiOperator::RiccatiOperator(std::shared_ptr<const Characteristics> chr, GeneratorConfig cfg)
    : l_(std::make_shared<const LinearOperator>(std::move(chr), cfg)) {}

CoeffSeries RiccatiOperator::apply(const CoeffSeries& u) const {
    const LinearOperator& L = *l_;
    if (L.config().form == GeneratorForm::moment) {
        const CoeffSeries E = exp_star(u);
        return mul(exp_star(-u), L.apply_moment(E));
    }
    const Characteristics& c = L.characteristics();
    const std::size_t d = L.dim();
    CoeffSeries out = L.apply_composition(u);
    std::vector<CoeffSeries> grad;
    for (std::size_t i = 0; i < d; ++i) grad.push_back(shift(u, MultiIndex::unit(d, i)));
    // (1/2) sum_{i,j} a_ij u_i u_j, written over i <= j with weight 1/beta!
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double w = i == j ? 0.5 : 1.0;
            out.add_scaled(w, mul(c.diffusion(i, j), mul(grad[i], grad[j])));
        }
    }
    if (c.has_kernel()) out += L.jump_exponential_term(u);
    return out;
}

}  // namespace holoseq
