#include "holoseq/characteristics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "holoseq/errors.hpp"

namespace holoseq {

void MomentTable::insert(const MultiIndex& beta, CoeffSeries m) {
    if (beta.degree() < 2) throw ValidationError("moment table: |beta| must be >= 2");
    entries_.insert_or_assign(beta, std::move(m));
}

const CoeffSeries* MomentTable::find(const MultiIndex& beta) const {
    auto it = entries_.find(beta);
    return it == entries_.end() ? nullptr : &it->second;
}

Characteristics::Characteristics(std::size_t dim, int order)
    : drift(dim, CoeffSeries(dim, order)), diffusion(dim, order) {}

namespace {

void check_series(const CoeffSeries& s, std::size_t d, int n, const std::string& what) {
    if (s.empty() || s.dim() != d || s.order() != n) {
        throw ValidationError("characteristics: " + what + " has mismatched dim/order");
    }
}

}  // namespace

void Characteristics::validate() const {
    const std::size_t d = dim();
    if (d == 0) throw ValidationError("characteristics: empty drift");
    const int n = order();
    for (std::size_t i = 0; i < d; ++i) check_series(drift[i], d, n, "drift");
    if (diffusion.rows() != d) throw ValidationError("characteristics: diffusion must be d x d");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) check_series(diffusion(i, j), d, n, "diffusion");
    if (!diffusion.is_symmetric()) throw ValidationError("characteristics: diffusion not symmetric");
    for (const auto& k : kernels) {
        check_series(k.intensity, d, n, "intensity");
        for (const auto& atom : k.atoms) {
            if (!(atom.weight >= 0.0) || !std::isfinite(atom.weight))
                throw ValidationError("characteristics: atom weight must be finite and >= 0");
            if (atom.jump_size.size() != d) throw ValidationError("characteristics: jump size needs d series");
            for (const auto& j : atom.jump_size) check_series(j, d, n, "jump size");
        }
    }
    if (supplied_moments) {
        for (const auto& [beta, m] : supplied_moments->entries()) {
            if (beta.dim() != d) throw ValidationError("characteristics: moment index dimension mismatch");
            check_series(m, d, n, "moment series");
        }
    }
}

Characteristics Characteristics::reordered(int new_order) const {
    const std::size_t d = dim();
    Characteristics c(d, new_order);
    for (std::size_t i = 0; i < d; ++i) {
        c.drift[i] = drift[i].reordered(new_order);
        for (std::size_t j = i; j < d; ++j) c.diffusion.set(i, j, diffusion(i, j).reordered(new_order));
    }
    for (const auto& k : kernels) {
        JumpKernel nk{k.intensity.reordered(new_order), {}};
        for (const auto& a : k.atoms) {
            JumpAtom na{a.weight, {}};
            for (const auto& j : a.jump_size) na.jump_size.push_back(j.reordered(new_order));
            nk.atoms.push_back(std::move(na));
        }
        c.kernels.push_back(std::move(nk));
    }
    if (supplied_moments) {
        MomentTable t(std::min(supplied_moments->b_max(), new_order));
        for (const auto& [beta, m] : supplied_moments->entries())
            if (static_cast<int>(beta.degree()) <= t.b_max()) t.insert(beta, m.reordered(new_order));
        c.supplied_moments = std::move(t);
    }
    return c;
}

CoeffSeries moment_series(const Characteristics& chr, const MultiIndex& beta) {
    if (beta.degree() < 2) throw ValidationError("momentSeries: |beta| must be >= 2");
    if (beta.dim() != chr.dim()) throw ValidationError("momentSeries: dimension mismatch");
    if (!chr.has_jumps()) throw ValidationError("momentSeries: no jump kernel");
    if (!chr.has_kernel()) {
        const CoeffSeries* m = chr.supplied_moments->find(beta);
        return m ? *m : zero(chr.dim(), chr.order());
    }
    CoeffSeries total = zero(chr.dim(), chr.order());
    for (const auto& k : chr.kernels) {
        CoeffSeries inner = zero(chr.dim(), chr.order());
        for (const auto& atom : k.atoms) inner.add_scaled(atom.weight, pow(atom.jump_size, beta));
        total += mul(k.intensity, inner);
    }
    return total;
}

MomentTable build_moment_table(const Characteristics& chr, int b_max) {
    if (b_max < 2) throw ValidationError("buildMomentTable: B_max must be >= 2");
    if (!chr.has_jumps()) throw ValidationError("buildMomentTable: no jump kernel");
    const std::size_t d = chr.dim();
    const int cap = std::min(b_max, chr.order());
    MomentTable table(cap);
    if (cap < 2) return table;
    if (!chr.has_kernel()) {
        for (const auto& [beta, m] : chr.supplied_moments->entries())
            if (static_cast<int>(beta.degree()) <= cap) table.insert(beta, m);
        return table;
    }

    // powers j^{*beta} per atom, built along graded order of beta
    const auto bsp = IndexSpace::get(d, cap);
    std::vector<CoeffSeries> sums(bsp->size(), zero(d, chr.order()));
    std::vector<unsigned> prev(d);
    for (const auto& k : chr.kernels) {
        std::vector<CoeffSeries> inner(bsp->size(), zero(d, chr.order()));
        for (const auto& atom : k.atoms) {
            std::vector<CoeffSeries> pw;
            pw.reserve(bsp->size());
            pw.push_back(unit(d, chr.order()));
            for (std::size_t b = 1; b < bsp->size(); ++b) {
                auto e = bsp->exponents(b);
                std::size_t i = 0;
                while (e[i] == 0) ++i;
                std::copy(e.begin(), e.end(), prev.begin());
                prev[i] -= 1;
                pw.push_back(mul(pw[bsp->index_of(prev)], atom.jump_size[i]));
                if (bsp->degree(b) >= 2) inner[b].add_scaled(atom.weight, pw.back());
            }
        }
        for (std::size_t b = bsp->degree_begin(2); b < bsp->size(); ++b) sums[b] += mul(k.intensity, inner[b]);
    }
    for (std::size_t b = bsp->degree_begin(2); b < bsp->size(); ++b) table.insert(bsp->multi_index(b), sums[b]);
    return table;
}

std::size_t GridReport::count(GridIssue::Kind k) const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.kind == k;
    return n;
}

bool Box::contains(std::span<const double> x, double slack) const {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

namespace {

std::string point_str(std::span<const double> x) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ')';
    return os.str();
}

bool real_enough(cplx v) { return std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v.real())); }

}  // namespace

GridReport validate_on_grid(const Characteristics& chr, const std::vector<std::vector<double>>& grid,
                            const std::optional<Box>& box) {
    chr.validate();
    const std::size_t d = chr.dim();
    GridReport rep;
    auto add = [&](GridIssue::Kind k, std::span<const double> x, std::string msg) {
        rep.issues.push_back({k, std::vector<double>(x.begin(), x.end()), msg + " at " + point_str(x)});
    };
    for (const auto& x : grid) {
        if (x.size() != d) throw ValidationError("validateOnGrid: grid point dimension mismatch");
        Eigen::MatrixXd a(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) = eval(chr.diffusion(i, j), std::span<const double>(x)).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
        const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
        if (es.eigenvalues().minCoeff() < -1e-12 * scale) add(GridIssue::Kind::non_psd_diffusion, x, "a(x) not PSD");

        for (const auto& k : chr.kernels) {
            const cplx lam = eval(k.intensity, std::span<const double>(x));
            if (!real_enough(lam)) add(GridIssue::Kind::complex_intensity, x, "lambda(x) not real");
            if (!(lam.real() > 0.0)) add(GridIssue::Kind::negative_intensity, x, "lambda(x) <= 0");
            for (const auto& atom : k.atoms) {
                if (atom.weight <= 0.0) continue;
                std::vector<double> y(d);
                double size = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double ji = eval(atom.jump_size[i], std::span<const double>(x)).real();
                    size += std::abs(ji);
                    y[i] = x[i] + ji;
                }
                if (size == 0.0) add(GridIssue::Kind::zero_jump, x, "jump size vanishes");
                if (box && !box->contains(y, 1e-12)) add(GridIssue::Kind::jump_leaves_box, x, "x + j(x,y) outside box");
            }
        }
        if (!chr.has_kernel() && chr.supplied_moments) {
            for (std::size_t i = 0; i < d; ++i) {
                MultiIndex b = MultiIndex::zero(d);
                b[i] = 2;
                if (const CoeffSeries* m = chr.supplied_moments->find(b)) {
                    if (eval(*m, std::span<const double>(x)).real() < -1e-12)
                        add(GridIssue::Kind::negative_second_moment, x, "m^{2e_i}(x) < 0");
                }
            }
        }
    }
    return rep;
}

}  // namespace holoseq
