#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "holoseq/cli.hpp"
#include "holoseq/errors.hpp"
#include "holoseq/models/presets.hpp"
#include "holoseq/odeflow.hpp"

namespace holoseq::cli {

int SeriesSpec::degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, static_cast<int>(t.first.degree()));
    return d;
}

CoeffSeries SeriesSpec::at(int order) const {
    if (degree() > order)
        throw ValidationError("config: series of degree " + std::to_string(degree()) + " exceeds the internal order " +
                              std::to_string(order));
    return CoeffSeries::from_terms(dim, order, terms);
}

Characteristics InlineModel::at(int order) const {
    Characteristics c(dim, order);
    for (std::size_t i = 0; i < dim; ++i) c.drift[i] = drift[i].at(order);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            const CoeffSeries a = diffusion[i * dim + k].at(order);
            const CoeffSeries b = diffusion[k * dim + i].at(order);
            if (abs_norm(a - b, 1.0) != 0.0) throw ValidationError("config: model.diffusion must be symmetric");
            if (k >= i) c.diffusion.set(i, k, a);
        }
    }
    for (const auto& k : kernels) {
        JumpKernel jk{k.intensity.at(order), {}};
        for (const auto& a : k.atoms) {
            SeriesVector j;
            for (const auto& s : a.jump) j.push_back(s.at(order));
            jk.atoms.push_back({a.weight, std::move(j)});
        }
        c.kernels.push_back(std::move(jk));
    }
    c.validate();
    return c;
}

namespace {

using Family = FunctionSpec::Family;

bool named_family(Family f) { return f == Family::exp || f == Family::cos || f == Family::sin; }

/// prod_i t_i^{alpha_i}
cplx power(std::span<const cplx> t, std::span<const unsigned> e) {
    cplx p = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) p *= t[i];
    return p;
}

cplx dot(std::span<const cplx> t, std::span<const double> x) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * x[i];
    return s;
}

std::vector<cplx> scaled(const std::vector<cplx>& t, cplx a) {
    std::vector<cplx> out(t);
    for (auto& v : out) v *= a;
    return out;
}

}  // namespace

std::size_t FunctionSpec::dim() const { return theta.empty() ? terms.dim : theta.size(); }

CoeffSeries FunctionSpec::holomorphic(int order) const {
    if (family == Family::series) return terms.at(order);
    CoeffSeries u(dim(), order);
    const IndexSpace& sp = u.space();
    if (family == Family::polynomial) {
        u = terms.at(order);
        for (std::size_t a = 0; a < sp.size(); ++a) u[a] *= sp.factorial(a);
        return u;
    }
    const cplx I(0.0, 1.0);
    const std::vector<cplx> ip = scaled(theta, I), im = scaled(theta, -I);
    for (std::size_t a = 0; a < sp.size(); ++a) {
        const auto e = sp.exponents(a);
        if (family == Family::exp) u[a] = power(theta, e);
        else if (family == Family::cos) u[a] = (power(ip, e) + power(im, e)) / 2.0;
        else u[a] = (power(ip, e) - power(im, e)) / (2.0 * I);
    }
    return u;
}

CoeffSeries FunctionSpec::exponent(int order) const {
    if (family == Family::series || family == Family::polynomial) {
        FunctionSpec f = *this;
        return f.holomorphic(order);
    }
    if (family != Family::exp) throw ValidationError("config: function.family: affine mode needs series, polynomial or exp");
    CoeffSeries u(dim(), order);
    for (std::size_t i = 0; i < dim(); ++i) u.add_scaled(theta[i], CoeffSeries::variable(dim(), order, i));
    return u;
}

cplx FunctionSpec::value(std::span<const double> x) const {
    switch (family) {
        case Family::series:
        case Family::polynomial:
            return eval(holomorphic(terms.degree()), x);
        case Family::exp:
            return std::exp(dot(theta, x));
        case Family::cos:
            return std::cos(dot(theta, x));
        case Family::sin:
            return std::sin(dot(theta, x));
    }
    return 0.0;
}

cplx FunctionSpec::exponent_value(std::span<const double> x) const {
    if (family == Family::exp) return dot(theta, x);
    return value(x);
}

void RunSpec::validate() const {
    const std::size_t dim = model ? model->dim : find_preset(preset).x0.size();
    if (function.dim() != dim) throw ValidationError("config: function: dimension does not match the model");
    if (x0.size() != dim) throw ValidationError("config: x0: expected " + std::to_string(dim) + " entries");
    for (double v : x0)
        if (!std::isfinite(v)) throw ValidationError("config: x0: entries must be finite");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("config: T: must be finite and >= 0");
    if (buffer < 0) throw ValidationError("config: buffer: must be >= 0");
    for (int n : orders) {
        if (n < 2) throw ValidationError("config: order: N must be >= 2 (got " + std::to_string(n) + ")");
        if (n + buffer > IndexSpace::kMaxOrder)
            throw ValidationError("config: order: N + buffer must be <= " + std::to_string(IndexSpace::kMaxOrder));
    }
    if (mode != RunMode::holomorphic && (function.family == Family::cos || function.family == Family::sin))
        throw ValidationError("config: function.family: affine mode needs series, polynomial or exp");
    if (mode == RunMode::both && function.family != Family::exp)
        throw ValidationError("config: function.family: mode both needs family exp");
    OdeConfig o = ode;
    o.t_end = T;
    try {
        o.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: ode: ") + e.what());
    }
    if (mc_paths > 0 && !(mc.dt > 0.0)) throw ValidationError("config: oracles.mc.dt: must be > 0");
    if (!preset.empty()) {
        const Preset& p = find_preset(preset);
        if (p.kind == PresetKind::chain) p.chain.state_index(x0);
    }
}

namespace {

struct Oracle {
    std::string name;
    cplx value;
    double stderr_ = 0.0;
};

struct Engine {
    std::string route;
    cplx value;
    double tail = 0.0;
    int trusted = -1;
    std::optional<SequenceFlow> flow;
};

std::vector<cplx> state_values(const FiniteChain& c, const std::function<cplx(std::span<const double>)>& f) {
    std::vector<cplx> v;
    for (const auto& s : c.states) v.push_back(f(s));
    return v;
}

Engine run_engine(const RunSpec& s, const Preset* p, bool affine, int n, const OdeConfig& ode) {
    Engine e;
    if (p && p->kind == PresetKind::chain) {
        const FiniteChain& c = p->chain;
        const std::size_t i0 = c.state_index(s.x0);
        e.trusted = n;
        if (!affine) {
            const int order = std::max(n, static_cast<int>(c.size()) - 1);
            const auto h = state_values(c, [&](std::span<const double> x) { return s.function.value(x); });
            e.route = "lagrange";
            e.value = eval(chain_expectation_series(c, h, s.T, order), s.x0);
            return e;
        }
        const auto uv = state_values(c, [&](std::span<const double> x) { return s.function.exponent_value(x); });
        Eigen::VectorXcd u(static_cast<Eigen::Index>(uv.size()));
        for (std::size_t i = 0; i < uv.size(); ++i) u[static_cast<Eigen::Index>(i)] = uv[i];
        if (s.route == AffineRoute::riccati) {
            e.route = "chain-riccati";
            e.value = std::exp(chain_affine_flow(c, u, ode).psi.back()[static_cast<Eigen::Index>(i0)]);
        } else {
            e.route = "chain-log";
            e.value = std::exp(chain_affine_log_route(c, u, s.T)[static_cast<Eigen::Index>(i0)]);
        }
        return e;
    }
    const int order = n + s.buffer;
    auto chr = std::make_shared<const Characteristics>(p ? p->characteristics(order) : s.model->at(order));
    auto L = std::make_shared<const LinearOperator>(chr, default_generator_config(*chr, n, s.buffer));
    FlowValue v;
    if (!affine) {
        e.route = "linear";
        e.flow = solve_linear(*L, s.function.holomorphic(order), ode);
        v = holomorphic_expectation(*e.flow, s.x0);
    } else if (s.route == AffineRoute::riccati) {
        e.route = "riccati";
        e.flow = solve_riccati(RiccatiOperator(L), s.function.exponent(order), ode);
        v = affine_expectation(*e.flow, s.x0);
    } else {
        e.route = "log-linear";
        e.flow = riccati_from_linear(*L, s.function.exponent(order), ode);
        v = affine_expectation(*e.flow, s.x0);
    }
    e.value = v.value;
    e.tail = v.tail;
    e.trusted = v.trusted_degree;
    return e;
}

/// E[X^k], k <= n, for X with cumulants kappa (kappa[0] unused).
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa, int n) {
    std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
    m[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
        double s = 0.0, binom = 1.0;  // C(j-1, k-1)
        for (int k = 1; k <= j; ++k) {
            s += binom * kappa[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(j - k)];
            binom = binom * (j - k) / k;
        }
        m[static_cast<std::size_t>(j)] = s;
    }
    return m;
}

bool in_w_star(const CoeffSeries& u) {
    for (cplx c : u.coeffs())
        if (c.imag() != 0.0 || !(c.real() >= 0.0)) return false;
    return true;
}

/// E exp(theta X_T) for the one-dimensional presets with a closed form.
std::optional<Oracle> mgf(const Preset& p, const RunSpec& s, cplx theta) {
    const double x0 = s.x0[0];
    switch (p.kind) {
        case PresetKind::levy:
            return Oracle{"levy-exponent", std::exp(theta * x0 + s.T * levy_exponent(p.levy, theta))};
        case PresetKind::affine: {
            const AffineExponents a = affine_transform(p.affine, theta, s.T);
            return Oracle{"affine-transform", std::exp(a.phi + a.psi * x0)};
        }
        default:
            return std::nullopt;
    }
}

std::vector<Oracle> closed_forms(const RunSpec& s, const Preset* p, bool affine) {
    std::vector<Oracle> out;
    if (!s.closed_form || !p) return out;
    const FunctionSpec& f = s.function;
    if (p->kind == PresetKind::chain) {
        const FiniteChain& c = p->chain;
        if (!affine) {
            out.push_back({"matrix-exp",
                           chain_expectation(c, state_values(c, [&](std::span<const double> x) { return f.value(x); }), s.T, s.x0)});
            return out;
        }
        const auto uv = state_values(c, [&](std::span<const double> x) { return f.exponent_value(x); });
        std::vector<cplx> eh;
        for (cplx v : uv) eh.push_back(std::exp(v));
        out.push_back({"matrix-exp", chain_expectation(c, eh, s.T, s.x0)});
        if (c.size() == 2) {
            const Eigen::Vector2cd psi = two_state_affine(c.rates(0, 1), c.rates(1, 0), uv[0], uv[1], s.T);
            out.push_back({"two-state-closed-form", std::exp(psi[static_cast<Eigen::Index>(c.state_index(s.x0))])});
        }
        return out;
    }
    if (p->kind == PresetKind::unit_interval) {
        CoeffSeries u = affine ? exp_star(f.exponent(IndexSpace::kMaxOrder)) : f.holomorphic(
            named_family(f.family) ? IndexSpace::kMaxOrder : std::max(f.terms.degree(), 0));
        if (in_w_star(u)) out.push_back({"dual-chain", unit_interval_dual(p->unit, u, s.T).evaluate(s.x0[0])});
        return out;
    }
    const cplx I(0.0, 1.0);
    if (affine) {
        // linear exponent c + tau x only
        const CoeffSeries u = f.exponent(std::max(1, f.family == Family::exp ? 1 : f.terms.degree()));
        for (std::size_t a = 2; a < u.size(); ++a)
            if (u[a] != 0.0) return out;
        if (auto m = mgf(*p, s, u[1])) out.push_back({m->name, std::exp(u[0]) * m->value});
        return out;
    }
    if (f.family == Family::exp) {
        if (auto m = mgf(*p, s, f.theta[0])) out.push_back(*m);
    } else if (f.family == Family::cos || f.family == Family::sin) {
        auto a = mgf(*p, s, I * f.theta[0]), b = mgf(*p, s, -I * f.theta[0]);
        if (a && b)
            out.push_back({a->name, f.family == Family::cos ? (a->value + b->value) / 2.0 : (a->value - b->value) / (2.0 * I)});
    } else if (p->kind == PresetKind::levy) {
        const int deg = f.terms.degree();
        const CoeffSeries u = f.holomorphic(deg);
        std::vector<double> kappa(static_cast<std::size_t>(deg) + 2, 0.0);
        kappa[1] = s.x0[0] + s.T * p->levy.b;
        for (int k = 2; k <= deg; ++k) {
            double c = k == 2 ? p->levy.a : 0.0;
            for (const auto& at : p->levy.atoms) c += at.weight * std::pow(at.jump, k);
            kappa[static_cast<std::size_t>(k)] = s.T * c;
        }
        const std::vector<double> m = moments_from_cumulants(kappa, deg);
        cplx v = 0.0;
        double fact = 1.0;
        for (int k = 0; k <= deg; ++k) {
            if (k > 0) fact *= k;
            v += u[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(k)] / fact;
        }
        out.push_back({"cumulant-moments", v});
    }
    return out;
}

std::optional<Oracle> monte_carlo(const RunSpec& s, const Preset* p, bool affine) {
    if (s.mc_paths == 0) return std::nullopt;
    PathModel pm;
    if (p) {
        pm = p->path_model();
    } else {
        int deg = 0;
        for (const auto& d : s.model->drift) deg = std::max(deg, d.degree());
        for (const auto& d : s.model->diffusion) deg = std::max(deg, d.degree());
        for (const auto& k : s.model->kernels) {
            deg = std::max(deg, k.intensity.degree());
            for (const auto& a : k.atoms)
                for (const auto& j : a.jump) deg = std::max(deg, j.degree());
        }
        pm = path_model(s.model->at(deg));
        pm.box = s.model->box;
        pm.absorb_below = s.model->absorb_below;
    }
    McConfig c = s.mc;
    c.paths = s.mc_paths;
    if (s.mc_mode_auto) c.mode = pm.has_absorption() ? JumpMode::per_step : JumpMode::thinning;
    const FunctionSpec& f = s.function;
    PathFn h = affine ? PathFn([&f](std::span<const double> x) { return std::exp(f.exponent_value(x)); })
                      : PathFn([&f](std::span<const double> x) { return f.value(x); });
    const McEstimate e = simulate_expectation(pm, h, s.x0, s.T, c);
    return Oracle{"monte-carlo", e.mean, e.std_error};
}

}  // namespace

RunResult execute(const RunSpec& s) {
    s.validate();
    const Preset* p = s.preset.empty() ? nullptr : &find_preset(s.preset);
    OdeConfig ode = s.ode;
    ode.t_end = s.T;
    RunResult r;
    std::vector<bool> modes;
    if (s.mode != RunMode::affine) modes.push_back(false);
    if (s.mode != RunMode::holomorphic) modes.push_back(true);
    for (bool affine : modes) {
        std::vector<Oracle> oracles = closed_forms(s, p, affine);
        if (auto mc = monte_carlo(s, p, affine)) oracles.push_back(*mc);
        const std::string mode = affine ? "affine" : "holomorphic";
        for (int n : s.orders) {
            const auto t0 = std::chrono::steady_clock::now();
            Engine e = run_engine(s, p, affine, n, ode);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            ResultRow row{n, mode, e.route, e.value, e.tail, e.trusted, "", 0.0, 0.0, secs};
            if (oracles.empty()) r.rows.push_back(row);
            for (const Oracle& o : oracles) {
                row.oracle = o.name;
                row.oracle_value = o.value;
                row.oracle_stderr = o.stderr_;
                r.rows.push_back(row);
            }
            if (s.flow_csv && e.flow) {
                std::ostringstream os;
                write_flow_csv(os, *e.flow);
                r.flow_files.emplace_back("flow_" + mode + "_N" + std::to_string(n) + ".csv", os.str());
            }
        }
    }
    return r;
}

namespace {

std::string fmt6(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", x);
    return b;
}

std::string fmt6(cplx z) {
    if (z.imag() == 0.0) return fmt6(z.real());
    char b[64];
    std::snprintf(b, sizeof b, "%.6g%+.6gi", z.real(), z.imag());
    return b;
}

std::string fmt17(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

}  // namespace

void write_table(std::ostream& os, const RunSpec& spec, const RunResult& r) {
    os << "# holoseq run\n# config: " << echo_run_spec(spec) << "\n";
    if (spec.mc_paths > 0) os << "# mc threads: " << mc_thread_count(spec.mc) << "\n";
    const std::vector<std::string> head{"N",      "mode",         "route",   "engine",   "tail",     "oracle",
                                        "oracle value", "oracle se", "abs diff", "rel diff", "time [s]"};
    std::vector<std::vector<std::string>> cells{head};
    for (const auto& row : r.rows) {
        const bool has = !row.oracle.empty();
        const double ad = has ? std::abs(row.engine - row.oracle_value) : 0.0;
        const double rd = has && row.oracle_value != 0.0 ? ad / std::abs(row.oracle_value) : 0.0;
        cells.push_back({std::to_string(row.order), row.mode, row.route, fmt6(row.engine), fmt6(row.tail),
                         has ? row.oracle : "-", has ? fmt6(row.oracle_value) : "-",
                         row.oracle_stderr > 0.0 ? fmt6(row.oracle_stderr) : "-", has ? fmt6(ad) : "-",
                         has && row.oracle_value != 0.0 ? fmt6(rd) : "-", fmt6(row.seconds)});
    }
    std::vector<std::size_t> w(head.size(), 0);
    for (const auto& c : cells)
        for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::max(w[i], c[i].size());
    for (const auto& c : cells) {
        std::string line;
        for (std::size_t i = 0; i < c.size(); ++i) {
            line += c[i];
            if (i + 1 < c.size()) line += std::string(w[i] - c[i].size() + 2, ' ');
        }
        os << line << "\n";
    }
}

void write_results_csv(std::ostream& os, const RunResult& r) {
    os << "order,mode,route,engine_re,engine_im,tail,trusted,oracle,oracle_re,oracle_im,oracle_stderr,abs_diff,"
          "seconds\n";
    for (const auto& row : r.rows) {
        const double ad = row.oracle.empty() ? 0.0 : std::abs(row.engine - row.oracle_value);
        os << row.order << ',' << row.mode << ',' << row.route << ',' << fmt17(row.engine.real()) << ','
           << fmt17(row.engine.imag()) << ',' << fmt17(row.tail) << ',' << row.trusted << ',' << row.oracle << ','
           << fmt17(row.oracle_value.real()) << ',' << fmt17(row.oracle_value.imag()) << ','
           << fmt17(row.oracle_stderr) << ',' << fmt17(ad) << ',' << fmt17(row.seconds) << '\n';
    }
}

void list_presets(std::ostream& os) {
    for (const Preset& p : preset_registry()) os << p.name << "  " << p.summary << "\n";
}

}  // namespace holoseq::cli
