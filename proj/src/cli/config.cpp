#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "holoseq/cli.hpp"
#include "holoseq/errors.hpp"
#include "holoseq/models/presets.hpp"

namespace holoseq::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError("config: " + field + ": " + what);
}

void allow_keys(const json& j, const std::string& field, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(field, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(field.empty() ? it.key() : field + "." + it.key(), "unknown key");
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

long long get_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<long long>();
}

bool get_bool(const json& j, const std::string& field) {
    if (!j.is_boolean()) fail(field, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
}

std::vector<double> get_reals(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

/// number or [re, im]
cplx get_cplx(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {get_number(j[0], field + "[0]"), get_number(j[1], field + "[1]")};
    fail(field, "expected a number or [re, im]");
}

/// [[exponents], re] or [[exponents], re, im]
SeriesSpec get_series(const json& j, const std::string& field, std::size_t dim) {
    if (!j.is_array()) fail(field, "expected a list of [[exponents], re, im] terms");
    SeriesSpec s;
    s.dim = dim;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string f = field + "[" + std::to_string(t) + "]";
        const json& term = j[t];
        if (!term.is_array() || term.size() < 2 || term.size() > 3 || !term[0].is_array())
            fail(f, "expected [[exponents], re] or [[exponents], re, im]");
        if (term[0].size() != dim) fail(f, "exponent tuple must have " + std::to_string(dim) + " entries");
        std::vector<unsigned> e;
        for (std::size_t k = 0; k < dim; ++k) {
            const long long v = get_integer(term[0][k], f + "[0][" + std::to_string(k) + "]");
            if (v < 0) fail(f, "exponents must be >= 0");
            e.push_back(static_cast<unsigned>(v));
        }
        const double re = get_number(term[1], f + "[1]");
        const double im = term.size() == 3 ? get_number(term[2], f + "[2]") : 0.0;
        s.terms.emplace_back(MultiIndex(std::move(e)), cplx(re, im));
    }
    return s;
}

InlineModel get_model(const json& j) {
    allow_keys(j, "model", {"dim", "drift", "diffusion", "kernels", "box", "absorb_below"});
    InlineModel m;
    if (!j.contains("dim")) fail("model.dim", "missing");
    const long long d = get_integer(j["dim"], "model.dim");
    if (d < 1 || d > 8) fail("model.dim", "must be in [1, 8]");
    m.dim = static_cast<std::size_t>(d);
    if (!j.contains("drift") || !j["drift"].is_array() || j["drift"].size() != m.dim)
        fail("model.drift", "expected one series per coordinate");
    for (std::size_t i = 0; i < m.dim; ++i)
        m.drift.push_back(get_series(j["drift"][i], "model.drift[" + std::to_string(i) + "]", m.dim));
    if (!j.contains("diffusion") || !j["diffusion"].is_array() || j["diffusion"].size() != m.dim)
        fail("model.diffusion", "expected a dim x dim matrix of series");
    for (std::size_t i = 0; i < m.dim; ++i) {
        const json& row = j["diffusion"][i];
        const std::string f = "model.diffusion[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != m.dim) fail(f, "expected dim series");
        for (std::size_t k = 0; k < m.dim; ++k)
            m.diffusion.push_back(get_series(row[k], f + "[" + std::to_string(k) + "]", m.dim));
    }
    if (j.contains("kernels")) {
        const json& ks = j["kernels"];
        if (!ks.is_array()) fail("model.kernels", "expected a list");
        for (std::size_t k = 0; k < ks.size(); ++k) {
            const std::string f = "model.kernels[" + std::to_string(k) + "]";
            allow_keys(ks[k], f, {"intensity", "atoms"});
            KernelSpec ker;
            if (!ks[k].contains("intensity")) fail(f + ".intensity", "missing");
            ker.intensity = get_series(ks[k]["intensity"], f + ".intensity", m.dim);
            if (!ks[k].contains("atoms") || !ks[k]["atoms"].is_array()) fail(f + ".atoms", "expected a list");
            const json& as = ks[k]["atoms"];
            for (std::size_t a = 0; a < as.size(); ++a) {
                const std::string fa = f + ".atoms[" + std::to_string(a) + "]";
                allow_keys(as[a], fa, {"weight", "jump"});
                AtomSpec atom;
                if (!as[a].contains("weight")) fail(fa + ".weight", "missing");
                atom.weight = get_number(as[a]["weight"], fa + ".weight");
                if (!(atom.weight >= 0.0)) fail(fa + ".weight", "must be >= 0");
                if (!as[a].contains("jump") || !as[a]["jump"].is_array() || as[a]["jump"].size() != m.dim)
                    fail(fa + ".jump", "expected one series per coordinate");
                for (std::size_t i = 0; i < m.dim; ++i)
                    atom.jump.push_back(get_series(as[a]["jump"][i], fa + ".jump[" + std::to_string(i) + "]", m.dim));
                ker.atoms.push_back(std::move(atom));
            }
            m.kernels.push_back(std::move(ker));
        }
    }
    if (j.contains("box")) {
        allow_keys(j["box"], "model.box", {"lo", "hi"});
        Box b;
        if (!j["box"].contains("lo") || !j["box"].contains("hi")) fail("model.box", "needs lo and hi");
        b.lo = get_reals(j["box"]["lo"], "model.box.lo");
        b.hi = get_reals(j["box"]["hi"], "model.box.hi");
        if (b.lo.size() != m.dim || b.hi.size() != m.dim) fail("model.box", "lo and hi need dim entries");
        for (std::size_t i = 0; i < m.dim; ++i)
            if (!(b.lo[i] < b.hi[i])) fail("model.box", "lo must be < hi");
        m.box = b;
    }
    if (j.contains("absorb_below")) {
        m.absorb_below = get_number(j["absorb_below"], "model.absorb_below");
        if (m.dim != 1 || !m.box) fail("model.absorb_below", "needs dim = 1 and a box");
    }
    return m;
}

FunctionSpec get_function(const json& j, std::size_t dim) {
    allow_keys(j, "function", {"family", "terms", "theta"});
    FunctionSpec f;
    const std::string fam = j.contains("family") ? get_string(j["family"], "function.family") : "series";
    if (fam == "series") f.family = FunctionSpec::Family::series;
    else if (fam == "polynomial") f.family = FunctionSpec::Family::polynomial;
    else if (fam == "exp") f.family = FunctionSpec::Family::exp;
    else if (fam == "cos") f.family = FunctionSpec::Family::cos;
    else if (fam == "sin") f.family = FunctionSpec::Family::sin;
    else fail("function.family", "expected series, polynomial, exp, cos or sin");
    const bool named = f.family == FunctionSpec::Family::exp || f.family == FunctionSpec::Family::cos ||
                       f.family == FunctionSpec::Family::sin;
    if (named) {
        if (!j.contains("theta") || !j["theta"].is_array()) fail("function.theta", "expected one entry per coordinate");
        if (j.contains("terms")) fail("function.terms", "not used by family " + fam);
        for (std::size_t i = 0; i < j["theta"].size(); ++i)
            f.theta.push_back(get_cplx(j["theta"][i], "function.theta[" + std::to_string(i) + "]"));
        if (f.theta.size() != dim) fail("function.theta", "expected " + std::to_string(dim) + " entries");
    } else {
        if (!j.contains("terms")) fail("function.terms", "missing");
        if (j.contains("theta")) fail("function.theta", "not used by family " + fam);
        f.terms = get_series(j["terms"], "function.terms", dim);
    }
    return f;
}

json series_json(const SeriesSpec& s) {
    json a = json::array();
    for (const auto& [alpha, v] : s.terms) {
        json e = json::array();
        for (std::size_t i = 0; i < alpha.dim(); ++i) e.push_back(alpha[i]);
        a.push_back(json::array({e, v.real(), v.imag()}));
    }
    return a;
}

json cplx_json(cplx c) { return c.imag() == 0.0 ? json(c.real()) : json::array({c.real(), c.imag()}); }

const char* family_name(FunctionSpec::Family f) {
    switch (f) {
        case FunctionSpec::Family::series: return "series";
        case FunctionSpec::Family::polynomial: return "polynomial";
        case FunctionSpec::Family::exp: return "exp";
        case FunctionSpec::Family::cos: return "cos";
        case FunctionSpec::Family::sin: return "sin";
    }
    return "series";
}

}  // namespace

RunSpec parse_run_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: not valid JSON: ") + e.what());
    }
    allow_keys(j, "", {"model", "function", "mode", "route", "T", "x0", "order", "orders", "buffer", "ode", "oracles",
                       "output"});
    RunSpec s;
    std::size_t dim = 1;
    if (!j.contains("model")) fail("model", "missing");
    if (j["model"].is_string()) {
        s.preset = j["model"].get<std::string>();
        const Preset& p = find_preset(s.preset);
        s.x0 = p.x0;
        dim = p.x0.size();
    } else {
        s.model = get_model(j["model"]);
        dim = s.model->dim;
        s.x0.assign(dim, 0.0);
    }
    if (!j.contains("function")) fail("function", "missing");
    s.function = get_function(j["function"], dim);

    if (j.contains("mode")) {
        const std::string m = get_string(j["mode"], "mode");
        if (m == "holomorphic") s.mode = RunMode::holomorphic;
        else if (m == "affine") s.mode = RunMode::affine;
        else if (m == "both") s.mode = RunMode::both;
        else fail("mode", "expected holomorphic, affine or both");
    }
    if (j.contains("route")) {
        const std::string r = get_string(j["route"], "route");
        if (r == "riccati") s.route = AffineRoute::riccati;
        else if (r == "log") s.route = AffineRoute::log;
        else fail("route", "expected riccati or log");
    }
    if (j.contains("T")) s.T = get_number(j["T"], "T");
    if (j.contains("x0")) s.x0 = get_reals(j["x0"], "x0");
    if (j.contains("order") && j.contains("orders")) fail("orders", "give either order or orders");
    if (j.contains("order")) s.orders = {static_cast<int>(get_integer(j["order"], "order"))};
    if (j.contains("orders")) {
        if (!j["orders"].is_array() || j["orders"].empty()) fail("orders", "expected a non-empty list");
        s.orders.clear();
        for (std::size_t i = 0; i < j["orders"].size(); ++i)
            s.orders.push_back(static_cast<int>(get_integer(j["orders"][i], "orders[" + std::to_string(i) + "]")));
    }
    if (j.contains("buffer")) s.buffer = static_cast<int>(get_integer(j["buffer"], "buffer"));

    if (j.contains("ode")) {
        const json& o = j["ode"];
        allow_keys(o, "ode", {"method", "rel_tol", "abs_tol", "step", "initial_step", "max_steps", "r_ref"});
        if (o.contains("method")) {
            const std::string m = get_string(o["method"], "ode.method");
            if (m == "rk4") s.ode.method = OdeMethod::rk4;
            else if (m == "rk45") s.ode.method = OdeMethod::rk45;
            else fail("ode.method", "expected rk4 or rk45");
        }
        if (o.contains("rel_tol")) s.ode.rel_tol = get_number(o["rel_tol"], "ode.rel_tol");
        if (o.contains("abs_tol")) s.ode.abs_tol = get_number(o["abs_tol"], "ode.abs_tol");
        if (o.contains("step")) s.ode.step = get_number(o["step"], "ode.step");
        if (o.contains("initial_step")) s.ode.initial_step = get_number(o["initial_step"], "ode.initial_step");
        if (o.contains("max_steps")) {
            const long long v = get_integer(o["max_steps"], "ode.max_steps");
            if (v < 1) fail("ode.max_steps", "must be >= 1");
            s.ode.max_steps = static_cast<std::size_t>(v);
        }
        if (o.contains("r_ref")) s.ode.r_ref = get_number(o["r_ref"], "ode.r_ref");
    }
    if (j.contains("oracles")) {
        const json& o = j["oracles"];
        allow_keys(o, "oracles", {"closed_form", "mc"});
        if (o.contains("closed_form")) s.closed_form = get_bool(o["closed_form"], "oracles.closed_form");
        if (o.contains("mc")) {
            const json& m = o["mc"];
            allow_keys(m, "oracles.mc", {"paths", "dt", "seed", "mode", "intensity_bound", "threads"});
            if (m.contains("paths")) {
                const long long v = get_integer(m["paths"], "oracles.mc.paths");
                if (v < 0) fail("oracles.mc.paths", "must be >= 0");
                s.mc_paths = static_cast<std::size_t>(v);
            }
            if (m.contains("dt")) s.mc.dt = get_number(m["dt"], "oracles.mc.dt");
            if (m.contains("seed")) {
                const long long v = get_integer(m["seed"], "oracles.mc.seed");
                if (v < 0) fail("oracles.mc.seed", "must be >= 0");
                s.mc.seed = static_cast<std::uint64_t>(v);
            }
            if (m.contains("mode")) {
                const std::string md = get_string(m["mode"], "oracles.mc.mode");
                if (md == "auto") s.mc_mode_auto = true;
                else if (md == "thinning") s.mc_mode_auto = false, s.mc.mode = JumpMode::thinning;
                else if (md == "per_step") s.mc_mode_auto = false, s.mc.mode = JumpMode::per_step;
                else fail("oracles.mc.mode", "expected auto, thinning or per_step");
            }
            if (m.contains("intensity_bound"))
                s.mc.intensity_bound = get_number(m["intensity_bound"], "oracles.mc.intensity_bound");
            if (m.contains("threads")) {
                const long long v = get_integer(m["threads"], "oracles.mc.threads");
                if (v < 0) fail("oracles.mc.threads", "must be >= 0");
                s.mc.threads = static_cast<unsigned>(v);
            }
        }
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        allow_keys(o, "output", {"dir", "flow_csv"});
        if (o.contains("dir")) s.out_dir = get_string(o["dir"], "output.dir");
        if (o.contains("flow_csv")) s.flow_csv = get_bool(o["flow_csv"], "output.flow_csv");
    }
    s.validate();
    return s;
}

RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_spec(ss.str());
}

std::string echo_run_spec(const RunSpec& s) {
    json j;
    if (!s.preset.empty()) {
        j["model"] = s.preset;
    } else {
        const InlineModel& m = *s.model;
        json model;
        model["dim"] = m.dim;
        json drift = json::array(), diff = json::array();
        for (const auto& d : m.drift) drift.push_back(series_json(d));
        for (std::size_t i = 0; i < m.dim; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < m.dim; ++k) row.push_back(series_json(m.diffusion[i * m.dim + k]));
            diff.push_back(row);
        }
        model["drift"] = drift;
        model["diffusion"] = diff;
        json ks = json::array();
        for (const auto& k : m.kernels) {
            json atoms = json::array();
            for (const auto& a : k.atoms) {
                json jump = json::array();
                for (const auto& js : a.jump) jump.push_back(series_json(js));
                atoms.push_back({{"weight", a.weight}, {"jump", jump}});
            }
            ks.push_back({{"intensity", series_json(k.intensity)}, {"atoms", atoms}});
        }
        model["kernels"] = ks;
        if (m.box) model["box"] = {{"lo", m.box->lo}, {"hi", m.box->hi}};
        if (m.absorb_below >= 0.0) model["absorb_below"] = m.absorb_below;
        j["model"] = model;
    }
    json f;
    f["family"] = family_name(s.function.family);
    if (s.function.theta.empty()) {
        f["terms"] = series_json(s.function.terms);
    } else {
        json th = json::array();
        for (cplx t : s.function.theta) th.push_back(cplx_json(t));
        f["theta"] = th;
    }
    j["function"] = f;
    j["mode"] = s.mode == RunMode::holomorphic ? "holomorphic" : s.mode == RunMode::affine ? "affine" : "both";
    j["route"] = s.route == AffineRoute::riccati ? "riccati" : "log";
    j["T"] = s.T;
    j["x0"] = s.x0;
    j["orders"] = s.orders;
    j["buffer"] = s.buffer;
    j["ode"] = {{"method", s.ode.method == OdeMethod::rk4 ? "rk4" : "rk45"},
                {"rel_tol", s.ode.rel_tol},
                {"abs_tol", s.ode.abs_tol},
                {"step", s.ode.step},
                {"initial_step", s.ode.initial_step},
                {"max_steps", s.ode.max_steps},
                {"r_ref", s.ode.r_ref}};
    const char* mode = s.mc_mode_auto ? "auto" : s.mc.mode == JumpMode::thinning ? "thinning" : "per_step";
    j["oracles"] = {{"closed_form", s.closed_form},
                    {"mc",
                     {{"paths", s.mc_paths},
                      {"dt", s.mc.dt},
                      {"seed", s.mc.seed},
                      {"mode", mode},
                      {"intensity_bound", s.mc.intensity_bound},
                      {"threads", s.mc.threads}}}};
    j["output"] = {{"dir", s.out_dir}, {"flow_csv", s.flow_csv}};
    return j.dump();
}

}  // namespace holoseq::cli
