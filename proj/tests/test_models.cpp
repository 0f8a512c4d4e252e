#include <doctest.h>

#include <random>

#include "holoseq/errors.hpp"
#include "holoseq/models/presets.hpp"
#include "holoseq/odeflow.hpp"
#include "support.hpp"

using namespace holoseq;

namespace {

FiniteChain two_state(double l12, double l21) {
    FiniteChain c;
    c.states = {{0.0}, {1.0}};
    c.rates.resize(2, 2);
    c.rates << 0.0, l12, l21, 0.0;
    return c;
}

FiniteChain random_chain(std::mt19937_64& g, int n) {
    std::uniform_real_distribution<double> rate(0.0, 2.0);
    FiniteChain c;
    for (int i = 0; i < n; ++i) c.states.push_back({static_cast<double>(i) / (n - 1)});
    c.rates.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.rates(i, j) = i == j ? 0.0 : rate(g);
    return c;
}

OdeConfig ode(double T) {
    OdeConfig c;
    c.t_end = T;
    return c;
}

}  // namespace

TEST_CASE("two-state transition matrix") {
    const Eigen::MatrixXd P = chain_transition(two_state(1.0, 1.0), 1.0);
    const double p = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(std::abs(P(0, 1) - p) <= 1e-14);
    CHECK(std::abs(P(1, 0) - p) <= 1e-14);
    CHECK(std::abs(P(0, 0) - (1.0 - p)) <= 1e-14);
    const double x0[] = {0.0};
    CHECK(std::abs(chain_expectation(two_state(1.0, 1.0), {0.0, 1.0}, 1.0, x0) - p) <= 1e-14);
}

TEST_CASE("chain transition rows are stochastic") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 10; ++rep) {
        const FiniteChain c = random_chain(g, 4);
        const Eigen::MatrixXd P = chain_transition(c, 0.8);
        for (Eigen::Index i = 0; i < P.rows(); ++i) {
            CHECK(std::abs(P.row(i).sum() - 1.0) <= 1e-12);
            CHECK(P.row(i).minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("Lagrange indicators") {
    std::mt19937_64 g(3);
    const FiniteChain c = random_chain(g, 4);
    const SeriesVector v = lagrange_indicators(c, 6);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(std::abs(eval(v[i], c.states[k]) - (i == k ? 1.0 : 0.0)) <= 1e-12);
    CHECK_THROWS_AS(lagrange_indicators(c, 2), ValidationError);
}

TEST_CASE("chain series route matches the matrix exponential") {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const FiniteChain c = random_chain(g, 4);
        std::vector<cplx> h;
        for (int i = 0; i < 4; ++i) h.push_back(val(g));
        for (double T : {0.0, 0.4, 1.0}) {
            const CoeffSeries s = chain_expectation_series(c, h, T, 6);
            for (std::size_t k = 0; k < 4; ++k)
                CHECK(std::abs(eval(s, c.states[k]) - chain_expectation(c, h, T, c.states[k])) <= 1e-10);
        }
    }
}

TEST_CASE("chain generator at the states") {
    std::mt19937_64 g(5);
    const FiniteChain c = random_chain(g, 3);
    const Characteristics chr = chain_characteristics(c, 12);
    LinearOperator L(std::make_shared<const Characteristics>(chr), default_generator_config(chr, 10, 2));
    CoeffSeries u = holoseq::testing::random_poly(1, 12, 2, 0.5, true);
    const CoeffSeries Lu = L.apply(u);
    const Eigen::MatrixXd G = chain_generator(c);
    for (std::size_t i = 0; i < 3; ++i) {
        cplx want = 0.0;
        for (std::size_t j = 0; j < 3; ++j) want += G(i, j) * eval(u, c.states[j]);
        CHECK(std::abs(eval(Lu, c.states[i]) - want) <= 1e-10);
    }
}

TEST_CASE("two-state affine closed form") {
    const FiniteChain c = two_state(1.0, 1.0);
    Eigen::VectorXcd u(2);
    u << 0.0, std::log(2.0);
    for (double t : {0.5, 1.0}) {
        const Eigen::Vector2cd closed = two_state_affine(1.0, 1.0, u[0], u[1], t);
        CHECK(std::abs(closed[0] - std::log(1.5 - std::exp(-2.0 * t) / 2.0)) <= 1e-14);
        const ChainAffineFlow f = chain_affine_flow(c, u, ode(t));
        CHECK((f.psi.back() - Eigen::VectorXcd(closed)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((chain_affine_log_route(c, u, t) - Eigen::VectorXcd(closed)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    // asymmetric rates and complex data
    const Eigen::Vector2cd cl = two_state_affine(0.7, 1.9, cplx(0.2, 0.3), cplx(-0.4, 0.1), 1.0);
    Eigen::VectorXcd w(2);
    w << cplx(0.2, 0.3), cplx(-0.4, 0.1);
    CHECK((chain_affine_flow(two_state(0.7, 1.9), w, ode(1.0)).psi.back() - Eigen::VectorXcd(cl)).cwiseAbs().maxCoeff() <=
          1e-8);
}

TEST_CASE("chain affine flow equals log of the expectation") {
    std::mt19937_64 g(9);
    const FiniteChain c = random_chain(g, 4);
    Eigen::VectorXcd u(4);
    u << 0.3, -0.2, 0.5, 0.1;
    const ChainAffineFlow f = chain_affine_flow(c, u, ode(1.0));
    std::vector<cplx> eh;
    for (int i = 0; i < 4; ++i) eh.push_back(std::exp(u[i]));
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(std::exp(f.psi.back()[i]) - chain_expectation(c, eh, 1.0, c.states[i])) <= 1e-9);
}

TEST_CASE("chain validation") {
    FiniteChain c = two_state(1.0, 1.0);
    c.rates(0, 1) = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = two_state(1.0, 1.0);
    c.states[1] = {0.0};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    const double x[] = {0.5};
    CHECK_THROWS_AS(two_state(1.0, 1.0).state_index(x), ValidationError);
}

TEST_CASE("Levy exponent") {
    const LevySpec s{0.0, 1.0, {{1.0, 0.5}, {1.0, -0.5}}};
    CHECK(std::abs(levy_exponent(s, 1.0) - 0.7552519304) <= 1e-10);
    const LevySpec t{0.3, 0.7, {{0.4, 0.9}, {1.2, -0.2}}};
    for (cplx tau : {cplx(0.3, 1.1), cplx(-2.0, 0.5)})
        CHECK(std::abs(levy_exponent(t, std::conj(tau)) - std::conj(levy_exponent(t, tau))) <= 1e-14);
    CHECK_THROWS_AS((LevySpec{0.0, -1.0, {}}.validate()), ValidationError);
}

TEST_CASE("Levy Riccati at cumulant order") {
    const LevySpec s{0.0, 1.0, {{1.0, 0.5}, {1.0, -0.5}}};
    const Characteristics chr = levy_characteristics(s, 12);
    RiccatiOperator R(std::make_shared<const Characteristics>(chr), default_generator_config(chr, 10, 2));
    CoeffSeries u = zero(1, 12);
    u[1] = cplx(0.4, -0.7);
    CHECK(std::abs(R.apply(u)[0] - levy_exponent(s, u[1])) <= 1e-13);
}

TEST_CASE("affine Brownian case") {
    AffineSpec s;
    s.b0 = 0.4;
    s.a0 = 0.9;
    for (cplx u : {cplx(0.5), cplx(0.2, 1.0)}) {
        const AffineExponents e = affine_transform(s, u, 1.5);
        CHECK(std::abs(e.phi - (0.4 * u * 1.5 + 0.9 * u * u * 1.5 / 2.0)) <= 1e-11);
        CHECK(std::abs(e.psi - u) <= 1e-14);
    }
    // b1 only: psi = u e^{b1 T}
    AffineSpec o;
    o.b1 = -0.5;
    CHECK(std::abs(affine_transform(o, 1.0, 2.0).psi - std::exp(-1.0)) <= 1e-11);
}

TEST_CASE("affine characteristics and validation") {
    const Preset& p = find_preset("affine-linear-jumps");
    const std::vector<MergedAtom> m = merged_atoms(p.affine);
    CHECK(m.size() == 2);
    const Characteristics chr = p.characteristics(6);
    CHECK(chr.kernels.size() == 2);
    AffineSpec bad = p.affine;
    bad.a1 = -1.0;  // a = 0.3 - x < 0 near x = 1
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    AffineSpec neg;
    neg.nu0 = {{-0.1, 0.5}};
    CHECK_THROWS_AS(neg.validate(), ValidationError);
    // a signed nu1 is fine while nu0 + x nu1 stays >= 0 on the box
    AffineSpec signed_ok;
    signed_ok.nu0 = {{1.0, 0.5}};
    signed_ok.nu1 = {{-0.5, 0.5}};
    CHECK_NOTHROW(signed_ok.validate());
}

TEST_CASE("unit-interval rates") {
    UnitIntervalModel m;
    m.k_max = 10;
    const RateTable t = unit_interval_rates(m);
    CHECK(t.rows[0].empty());
    CHECK(t.rows[1].empty());
    REQUIRE(t.rows[2].size() == 2);
    for (auto [j, r] : t.rows[2]) CHECK(r == (j == 1 ? 1.0 : 2.0));
    for (auto [j, r] : t.rows[3]) CHECK(r == (j == 2 ? 2.5 : 5.0));
    CHECK(t.rows[10].size() == 1);
    CHECK(t.dropped_rate == 12.0 * 9.0 / 2.0);
    m.k_max = 3;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("unit-interval generator on (x/2)^k") {
    const PathModel pm = unit_interval_path_model(UnitIntervalModel{});
    for (int k : {2, 3, 5}) {
        Evaluable f{[k](std::span<const double> x) { return cplx(std::pow(x[0] / 2.0, k)); }, {}, {}};
        for (double x = 0.2; x <= 0.8 + 1e-12; x += 0.1) {
            const double p[] = {x};
            CHECK(std::abs(pointwise_generator(pm, f, p) - unit_interval_generator_fk(k, x)) <= 1e-6);
        }
    }
    const double x = 0.3;
    const double f1 = x / 2, f2 = f1 * f1, f3 = f2 * f1;
    CHECK(std::abs(unit_interval_generator_fk(2, x) - (f1 + 2 * f3 - 3 * f2)) <= 1e-10);
    CHECK(unit_interval_generator_fk(1, x) == 0.0);
    CHECK(unit_interval_generator_fk(0, x) == 0.0);
}

TEST_CASE("unit-interval series generator") {
    const Characteristics chr = unit_interval_characteristics(14);
    CHECK(validate_on_grid(chr, {{0.1}, {0.5}, {0.9}}).ok());
    LinearOperator L(std::make_shared<const Characteristics>(chr), default_generator_config(chr, 12, 2));
    const CoeffSeries f = CoeffSeries::from_terms(1, 14, {{MultiIndex{3}, 6.0 / 8.0}});  // (z/2)^3
    const CoeffSeries Lf = L.apply(f);
    for (double x : {0.1, 0.4, 0.9}) {
        const double p[] = {x};
        CHECK(std::abs(eval(Lf, p) - unit_interval_generator_fk(3, x)) <= 1e-12);
    }
}

TEST_CASE("unit-interval dual") {
    UnitIntervalModel m;
    CoeffSeries u = zero(1, 170);
    for (int k = 0; k <= 170; ++k) u[k] = 1.0;  // h_u = e^x
    SUBCASE("T = 0 returns u") {
        const UnitIntervalDual d = unit_interval_dual(m, u, 0.0);
        CHECK(holoseq::testing::max_rel_diff(d.c, u, 150) <= 1e-14);
        CHECK(std::abs(d.evaluate(0.5) - std::exp(0.5)) <= 1e-14);
    }
    SUBCASE("constants are preserved") {
        const UnitIntervalDual d = unit_interval_dual(m, CoeffSeries::constant(1, 10, 2.5), 3.0);
        CHECK(std::abs(d.evaluate(0.3) - 2.5) <= 1e-13);
        CHECK(d.outflow == 0.0);
    }
    SUBCASE("mass and positivity") {
        const UnitIntervalDual d = unit_interval_dual(m, u, 0.5);
        double sum = 0.0;
        for (double mu : d.mu) {
            CHECK(mu >= 0.0);
            sum += mu;
        }
        CHECK(std::abs(sum + d.outflow - d.mass0) <= 1e-10 * d.mass0);
        CHECK(sum <= d.mass0);
        CHECK(d.value_bound <= m.outflow_tol * d.mass0);
    }
    SUBCASE("total mass is non-increasing in T") {
        double prev = std::exp(2.0);
        for (double T : {0.1, 0.3, 0.6}) {
            const UnitIntervalDual d = unit_interval_dual(m, u, T);
            double sum = 0.0;
            for (double mu : d.mu) sum += mu;
            CHECK(sum <= prev + 1e-12);
            prev = sum;
        }
    }
    SUBCASE("narrow truncation is rejected") {
        UnitIntervalModel small;
        small.k_max = 8;
        CoeffSeries v = zero(1, 8);
        for (int k = 0; k <= 8; ++k) v[k] = 1.0;
        CHECK_THROWS_AS(unit_interval_dual(small, v, 2.0), TruncationError);
    }
    SUBCASE("input outside W*") {
        CoeffSeries w = u;
        w[3] = -1.0;
        CHECK_THROWS_AS(unit_interval_dual(m, w, 0.5), ValidationError);
    }
}

TEST_CASE("presets") {
    const auto& reg = preset_registry();
    CHECK(reg.size() == 6);
    for (std::size_t i = 1; i < reg.size(); ++i) CHECK(reg[i - 1].name < reg[i].name);
    for (const Preset& p : reg) {
        CHECK(p.grid.size() == 5);
        const Characteristics chr = p.characteristics(8);
        CHECK_NOTHROW(chr.validate());
        CHECK_NOTHROW(p.path_model());
    }
    CHECK_THROWS_AS(find_preset("nope"), ValidationError);
}
