#include <doctest.h>

#include <algorithm>

#include "holoseq/characteristics.hpp"
#include "holoseq/errors.hpp"
#include "support.hpp"

using namespace holoseq;
using holoseq::testing::max_abs_diff;

namespace {

Characteristics brownian(int order) {
    Characteristics c(1, order);
    c.drift[0] = zero(1, order);
    c.diffusion.set(0, 0, unit(1, order));
    return c;
}

Characteristics two_atoms(int order) {
    Characteristics c = brownian(order);
    c.diffusion.set(0, 0, zero(1, order));
    JumpKernel k{unit(1, order), {}};
    k.atoms.push_back({1.0, {CoeffSeries::constant(1, order, 0.5)}});
    k.atoms.push_back({1.0, {CoeffSeries::constant(1, order, -0.5)}});
    c.kernels.push_back(k);
    return c;
}

// Polynomial jump sizes, one or two kernels, d = 1 or 2.
Characteristics random_jumps(std::size_t d, int order, int atoms) {
    using holoseq::testing::random_poly;
    Characteristics c(d, order);
    for (std::size_t i = 0; i < d; ++i) c.drift[i] = random_poly(d, order, 1, 0.3, true);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) c.diffusion.set(i, j, random_poly(d, order, 1, 0.2, true));
    JumpKernel k{random_poly(d, order, 1, 0.3, true), {}};
    k.intensity[0] = 1.0;
    for (int m = 0; m < atoms; ++m) {
        JumpAtom a{holoseq::testing::uniform(0.1, 1.0), {}};
        for (std::size_t i = 0; i < d; ++i) a.jump_size.push_back(random_poly(d, order, 2, 0.4, true));
        k.atoms.push_back(a);
    }
    c.kernels.push_back(k);
    return c;
}

// sum_atoms w j^beta with powers built one factor at a time
CoeffSeries naive_moment(const Characteristics& c, const MultiIndex& beta) {
    const std::size_t d = c.dim();
    CoeffSeries total = zero(d, c.order());
    for (const auto& k : c.kernels) {
        CoeffSeries inner = zero(d, c.order());
        for (const auto& a : k.atoms) {
            CoeffSeries p = unit(d, c.order());
            for (std::size_t i = 0; i < d; ++i)
                for (unsigned r = 0; r < beta[i]; ++r) p = holoseq::testing::naive_mul(p, a.jump_size[i]);
            inner.add_scaled(a.weight, p);
        }
        total += holoseq::testing::naive_mul(k.intensity, inner);
    }
    return total;
}

}  // namespace

TEST_CASE("moments of a constant jump size") {
    Characteristics c = brownian(6);
    JumpKernel k{unit(1, 6), {{0.7, {CoeffSeries::constant(1, 6, 1.5)}}}};
    c.kernels.push_back(k);
    for (unsigned b = 2; b <= 6; ++b) {
        CoeffSeries m = moment_series(c, MultiIndex{b});
        CHECK(m[0].real() == doctest::Approx(0.7 * std::pow(1.5, b)).epsilon(1e-15));
        for (std::size_t a = 1; a < m.size(); ++a) CHECK(m[a] == cplx(0.0));
    }
}

TEST_CASE("two symmetric atoms") {
    Characteristics c = two_atoms(8);
    CHECK(moment_series(c, MultiIndex{2})[0] == cplx(0.5));
    CHECK(moment_series(c, MultiIndex{3})[0] == cplx(0.0));
    MomentTable t = build_moment_table(c, 4);
    REQUIRE(t.find(MultiIndex{2}));
    REQUIRE(t.find(MultiIndex{4}));
    CHECK(t.find(MultiIndex{2})->at(MultiIndex{0}) == cplx(0.5));
    CHECK(t.find(MultiIndex{4})->at(MultiIndex{0}) == cplx(0.125));
    for (unsigned b = 3; b <= 8; b += 2) {
        CoeffSeries m = moment_series(c, MultiIndex{b});
        for (std::size_t a = 0; a < m.size(); ++a) CHECK(m[a] == cplx(0.0));
    }
}

TEST_CASE("table with B_max = 2 has one entry") {
    MomentTable t = build_moment_table(two_atoms(5), 2);
    CHECK(t.entries().size() == 1);
    CHECK(t.find(MultiIndex{2}) != nullptr);
}

TEST_CASE("table matches naive moments and individual calls") {
    for (std::size_t d : {1u, 2u}) {
        const int n = d == 1 ? 9 : 6;
        Characteristics c = random_jumps(d, n, 3);
        MomentTable t = build_moment_table(c, n);
        CHECK(t.entries().size() == IndexSpace::get(d, n)->size() - IndexSpace::get(d, n)->degree_begin(2));
        for (const auto& [beta, m] : t.entries()) {
            CHECK(max_abs_diff(m, naive_moment(c, beta), n) <= 1e-12 * (1.0 + holoseq::abs_norm(m, 1.0)));
            CHECK(max_abs_diff(m, moment_series(c, beta), n) <= 1e-14 * (1.0 + holoseq::abs_norm(m, 1.0)));
        }
    }
}

TEST_CASE("table is invariant under atom permutation") {
    Characteristics c = random_jumps(2, 6, 4);
    Characteristics p = c;
    std::reverse(p.kernels[0].atoms.begin(), p.kernels[0].atoms.end());
    MomentTable a = build_moment_table(c, 6), b = build_moment_table(p, 6);
    for (const auto& [beta, m] : a.entries()) {
        const CoeffSeries& q = *b.find(beta);
        for (std::size_t k = 0; k < m.size(); ++k)
            CHECK(std::abs(m[k] - q[k]) <= 1e-15 * std::max(1.0, std::abs(m[k])) * 8);
    }
}

TEST_CASE("moments need |beta| >= 2 and a kernel") {
    CHECK_THROWS_AS(moment_series(two_atoms(4), MultiIndex{1}), ValidationError);
    CHECK_THROWS_AS(moment_series(brownian(4), MultiIndex{2}), ValidationError);
    CHECK_THROWS_AS(build_moment_table(two_atoms(4), 1), ValidationError);
}

TEST_CASE("shape validation") {
    Characteristics c = brownian(4);
    CHECK_NOTHROW(c.validate());
    c.drift[0] = zero(1, 5);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    Characteristics n = two_atoms(4);
    n.kernels[0].atoms[0].weight = -1.0;
    CHECK_THROWS_AS(n.validate(), ValidationError);
}

TEST_CASE("grid audit") {
    const std::vector<std::vector<double>> grid{{-1.0}, {0.0}, {0.5}, {2.0}};
    CHECK(validate_on_grid(brownian(4), grid).ok());

    Characteristics neg = two_atoms(4);
    neg.kernels[0].intensity = CoeffSeries::constant(1, 4, -1.0);
    GridReport r = validate_on_grid(neg, grid);
    CHECK(r.count(GridIssue::Kind::negative_intensity) == grid.size());

    Characteristics nd = brownian(4);
    nd.diffusion.set(0, 0, CoeffSeries::variable(1, 4, 0));  // a(x) = x
    r = validate_on_grid(nd, grid);
    CHECK(r.count(GridIssue::Kind::non_psd_diffusion) == 1);

    Characteristics zj = two_atoms(4);
    zj.kernels[0].atoms[1].jump_size[0] = zero(1, 4);
    CHECK(validate_on_grid(zj, grid).count(GridIssue::Kind::zero_jump) == grid.size());

    Box box{{-1.0}, {1.0}};
    const std::vector<std::vector<double>> inner{{0.0}, {0.75}};
    r = validate_on_grid(two_atoms(4), inner, box);
    CHECK(r.count(GridIssue::Kind::jump_leaves_box) == 1);
}

TEST_CASE("2d diffusion PSD check") {
    Characteristics c(2, 3);
    for (std::size_t i = 0; i < 2; ++i) c.drift[i] = zero(2, 3);
    c.diffusion.set(0, 0, unit(2, 3));
    c.diffusion.set(1, 1, unit(2, 3));
    c.diffusion.set(0, 1, CoeffSeries::constant(2, 3, 0.5));
    CHECK(validate_on_grid(c, {{0.0, 0.0}}).ok());
    c.diffusion.set(0, 1, CoeffSeries::constant(2, 3, 1.5));
    CHECK(validate_on_grid(c, {{0.0, 0.0}}).count(GridIssue::Kind::non_psd_diffusion) == 1);
}

TEST_CASE("reordered pads and truncates consistently") {
    Characteristics c = random_jumps(1, 6, 2);
    Characteristics up = c.reordered(9);
    CHECK(up.order() == 9);
    CHECK_NOTHROW(up.validate());
    Characteristics back = up.reordered(6);
    for (std::size_t a = 0; a < c.drift[0].size(); ++a) CHECK(back.drift[0][a] == c.drift[0][a]);
}
