#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holoseq/series.hpp"

namespace holoseq {

/// One atom y of the finite measure F: mass and jump size j(., y).
struct JumpAtom {
    double weight = 0.0;
    SeriesVector jump_size;
};

/**
 * @brief K(x, A) = lambda(x) sum_m w_m 1_A(j(x, y_m)).
 */
struct JumpKernel {
    CoeffSeries intensity;
    std::vector<JumpAtom> atoms;
};

/**
 * @brief Moment series m^beta for 2 <= |beta| <= b_max.
 */
class MomentTable {
public:
    MomentTable() = default;
    explicit MomentTable(int b_max) : b_max_(b_max) {}

    int b_max() const { return b_max_; }
    void insert(const MultiIndex& beta, CoeffSeries m);
    /// nullptr if beta is absent (a zero moment need not be stored).
    const CoeffSeries* find(const MultiIndex& beta) const;
    const std::map<MultiIndex, CoeffSeries>& entries() const { return entries_; }

private:
    int b_max_ = 0;
    std::map<MultiIndex, CoeffSeries> entries_;
};

/**
 * @brief Characteristics (b, a, K) of a jump-diffusion in series form.
 *
 * The kernel is either a list of JumpKernel terms (summed; the affine case
 * nu0 + x nu1 uses two) or, for kernels without a usable series jump size,
 * a directly supplied MomentTable. All series share dim and order.
 */
struct Characteristics {
    Characteristics() = default;
    Characteristics(std::size_t dim, int order);

    std::size_t dim() const { return drift.size(); }
    int order() const { return drift.empty() ? -1 : drift.front().order(); }

    bool has_kernel() const { return !kernels.empty(); }
    bool has_jumps() const { return has_kernel() || supplied_moments.has_value(); }

    /// Throws ValidationError on inconsistent shapes, negative weights or an
    /// asymmetric diffusion matrix.
    void validate() const;

    /// Same data at another order (zero padded or truncated).
    Characteristics reordered(int new_order) const;

    SeriesVector drift;
    SeriesMatrix diffusion;
    std::vector<JumpKernel> kernels;
    std::optional<MomentTable> supplied_moments;
};

/// m^beta = sum_kernels lambda * sum_atoms w j^{*beta}; |beta| >= 2.
CoeffSeries moment_series(const Characteristics& chr, const MultiIndex& beta);

/// All m^beta with 2 <= |beta| <= min(b_max, order).
MomentTable build_moment_table(const Characteristics& chr, int b_max);

struct GridIssue {
    enum class Kind {
        negative_intensity,
        complex_intensity,
        non_psd_diffusion,
        zero_jump,
        jump_leaves_box,
        negative_second_moment,
    };
    Kind kind;
    std::vector<double> point;
    std::string detail;
};

struct GridReport {
    std::vector<GridIssue> issues;
    bool ok() const { return issues.empty(); }
    std::size_t count(GridIssue::Kind k) const;
};

struct Box {
    std::vector<double> lo, hi;
    bool contains(std::span<const double> x, double slack = 0.0) const;
};

/**
 * @brief Spot-check the standing assumptions at grid points.
 *
 * Reports lambda <= 0 or non-real, a(x) not PSD, a zero jump size on an atom
 * with positive weight, and (flag only) x + j(x, y) outside `box`. With only
 * supplied moments, the diagonal second moments are checked for
 * nonnegativity instead.
 */
GridReport validate_on_grid(const Characteristics& chr, const std::vector<std::vector<double>>& grid,
                            const std::optional<Box>& box = std::nullopt);

}  // namespace holoseq
