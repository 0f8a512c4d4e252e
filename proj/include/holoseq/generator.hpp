#pragma once

#include <memory>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/series.hpp"

namespace holoseq {

enum class GeneratorForm { moment, composition };

/**
 * @brief Truncation settings of L and R.
 *
 * The operators act on series of order working_order + buffer, which must be
 * the order of the characteristics.
 */
struct GeneratorConfig {
    GeneratorForm form = GeneratorForm::composition;
    int b_max = 2;
    int working_order = 0;
    int buffer = 2;

    int internal_order() const { return working_order + buffer; }
};

/// Composition form when the kernel has series jump sizes (or there are no
/// jumps), moment form when only moments are supplied. B_max = N.
GeneratorConfig default_generator_config(const Characteristics& chr, int working_order, int buffer);

/**
 * @brief The linear operator L with h_{L(u)} = A h_u.
 */
class LinearOperator {
public:
    LinearOperator(std::shared_ptr<const Characteristics> chr, GeneratorConfig cfg);

    CoeffSeries apply(const CoeffSeries& u) const;
    CoeffSeries apply_moment(const CoeffSeries& u) const;
    CoeffSeries apply_composition(const CoeffSeries& u) const;

    const Characteristics& characteristics() const { return *chr_; }
    const std::shared_ptr<const Characteristics>& characteristics_ptr() const { return chr_; }
    const GeneratorConfig& config() const { return cfg_; }
    std::size_t dim() const { return chr_->dim(); }
    int order() const { return chr_->order(); }

    /// Sum over kernels and atoms of lambda * w (exp*(u o j - u) - 1 - (u o j - u)).
    CoeffSeries jump_exponential_term(const CoeffSeries& u) const;

private:
    void check_input(const CoeffSeries& u) const;
    CoeffSeries drift_diffusion(const CoeffSeries& u, bool with_moments) const;

    struct AtomPlan {
        double weight;
        ComposePlan plan;
    };
    struct KernelPlan {
        CoeffSeries intensity;
        std::vector<AtomPlan> atoms;
    };

    std::shared_ptr<const Characteristics> chr_;
    GeneratorConfig cfg_;
    std::vector<KernelPlan> kernel_plans_;
    MomentTable moments_;  // empty unless jumps are present
};

/**
 * @brief The Riccati operator R with h_{R(u)} = exp(-h_u) A exp(h_u).
 *
 * Composition form uses the closed expression with the quadratic diffusion
 * term and exp* of the composed jump increment; moment form (moment-only
 * kernels) evaluates exp*(-u) * L(exp*(u)).
 */
class RiccatiOperator {
public:
    explicit RiccatiOperator(std::shared_ptr<const LinearOperator> l);
    RiccatiOperator(std::shared_ptr<const Characteristics> chr, GeneratorConfig cfg);

    CoeffSeries apply(const CoeffSeries& u) const;

    const LinearOperator& linear() const { return *l_; }
    const GeneratorConfig& config() const { return l_->config(); }

private:
    std::shared_ptr<const LinearOperator> l_;
};

inline CoeffSeries apply_l_moment(const LinearOperator& op, const CoeffSeries& u) { return op.apply_moment(u); }
inline CoeffSeries apply_l_composition(const LinearOperator& op, const CoeffSeries& u) {
    return op.apply_composition(u);
}
inline CoeffSeries apply_r(const RiccatiOperator& op, const CoeffSeries& u) { return op.apply(u); }

}  // namespace holoseq
