#include "holoseq/montecarlo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "holoseq/errors.hpp"

namespace holoseq {

namespace {

// Sparse pointwise evaluator for a real argument: only nonzero terms,
// u_alpha / alpha! x^alpha, powers by repeated multiplication.
class TermEval {
public:
    explicit TermEval(const CoeffSeries& u) : d_(u.dim()) {
        const auto& sp = u.space();
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (u[k] == cplx(0.0)) continue;
            auto e = sp.exponents(k);
            const double c = u[k].real() * sp.inv_factorial(k);
            terms_.push_back({std::vector<unsigned>(e.begin(), e.end()), c});
        }
        constant_ = terms_.empty() || (terms_.size() == 1 && std::all_of(terms_[0].e.begin(), terms_[0].e.end(),
                                                                        [](unsigned v) { return v == 0; }));
        if (constant_) value_ = terms_.empty() ? 0.0 : terms_[0].c;
    }

    double operator()(std::span<const double> x) const {
        if (constant_) return value_;
        double s = 0.0;
        for (const auto& t : terms_) {
            double p = t.c;
            for (std::size_t i = 0; i < d_; ++i)
                for (unsigned k = 0; k < t.e[i]; ++k) p *= x[i];
            s += p;
        }
        return s;
    }

private:
    struct Term {
        std::vector<unsigned> e;
        double c;
    };
    std::size_t d_;
    std::vector<Term> terms_;
    bool constant_ = false;
    double value_ = 0.0;
};

double fd_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

void fd_gradient(const Evaluable& f, std::span<const double> x, std::span<cplx> g) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = fd_step(x[i]);
        auto at = [&](double off) {
            y[i] = x[i] + off;
            return f.value(y);
        };
        g[i] = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
        y[i] = x[i];
    }
}

void fd_hessian(const Evaluable& f, std::span<const double> x, std::span<cplx> H) {
    const std::size_t d = x.size();
    std::vector<double> y(x.begin(), x.end());
    const cplx f0 = f.value(x);
    for (std::size_t i = 0; i < d; ++i) {
        const double h = fd_step(x[i]);
        auto at = [&](double off) {
            y[i] = x[i] + off;
            return f.value(y);
        };
        H[i * d + i] = (-at(2 * h) + 16.0 * at(h) - 30.0 * f0 + 16.0 * at(-h) - at(-2 * h)) / (12.0 * h * h);
        y[i] = x[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double hi = fd_step(x[i]), hj = fd_step(x[j]);
            auto mixed = [&](double s) {
                auto at = [&](double a, double b) {
                    y[i] = x[i] + a * s * hi;
                    y[j] = x[j] + b * s * hj;
                    return f.value(y);
                };
                const cplx v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * s * s * hi * hj);
                y[i] = x[i];
                y[j] = x[j];
                return v;
            };
            const cplx v = (4.0 * mixed(1.0) - mixed(2.0)) / 3.0;
            H[i * d + j] = v;
            H[j * d + i] = v;
        }
    }
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string point_str(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ')';
    return os.str();
}

void validate_config(const PathModel& m, std::span<const double> x0, double T, const McConfig& cfg) {
    if (cfg.paths < 1) throw ValidationError("mc: paths must be >= 1");
    if (!(cfg.dt > 0.0)) throw ValidationError("mc: dt must be > 0");
    if (!(T >= 0.0)) throw ValidationError("mc: T must be >= 0");
    if (x0.size() != m.dim) throw ValidationError("mc: x0 dimension mismatch");
    if (cfg.intensity_bound < 0.0) throw ValidationError("mc: intensity bound must be >= 0");
    if (m.has_absorption() && (m.dim != 1 || !m.box)) throw ValidationError("mc: absorption needs d = 1 and a box");
}

// Sqrt factor S with S S^T = a; aborts on a negative eigenvalue.
void diffusion_factor(const PathModel& m, std::span<const double> x, std::vector<double>& a,
                      std::vector<double>& S) {
    const std::size_t d = m.dim;
    m.diffusion(x, a);
    if (d == 1) {
        if (a[0] < -1e-12) throw SimulationError("mc: non-PSD diffusion at " + point_str(x));
        S[0] = std::sqrt(std::max(a[0], 0.0));
        return;
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(a.data(), d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const auto& ev = es.eigenvalues();
    const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -1e-12 * scale) throw SimulationError("mc: non-PSD diffusion at " + point_str(x));
    Eigen::MatrixXd F = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) S[i * d + j] = F(i, j);
}

struct PathStats {
    std::size_t clamps = 0;
    bool exited = false;
    bool absorbed = false;
    std::size_t jumps = 0;
};

// Reflect coordinates into the box; counts one clamp per reflected step.
bool reflect(const Box& box, std::span<double> x) {
    bool hit = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = box.lo[i], hi = box.hi[i];
        for (int rep = 0; rep < 4 && (x[i] < lo || x[i] > hi); ++rep) {
            hit = true;
            x[i] = x[i] < lo ? 2.0 * lo - x[i] : 2.0 * hi - x[i];
        }
        if (x[i] < lo || x[i] > hi) {
            hit = true;
            x[i] = std::clamp(x[i], lo, hi);
        }
    }
    return hit;
}

using StepHook = std::function<void(std::span<const double> x, double h)>;

// One Euler path from x0 to T. `hook` sees the left-point state of each step.
void run_path(const PathModel& m, std::span<const double> x0, double T, const McConfig& cfg, double bound,
              std::mt19937_64& rng, std::vector<double>& x, PathStats& st, const StepHook* hook) {
    const std::size_t d = m.dim;
    x.assign(x0.begin(), x0.end());
    if (T == 0.0) return;
    const std::size_t n = static_cast<std::size_t>(std::ceil(T / cfg.dt - 1e-9));
    const double h = T / static_cast<double>(n);
    const double sqh = std::sqrt(h);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> b(d), a(d * d), S(d * d), dw(d), size(d), rates(m.jumps.size());

    auto rate_sum = [&](std::span<const double> y) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.jumps.size(); ++c) {
            rates[c] = m.jumps[c].rate(y);
            if (!(rates[c] >= 0.0)) throw SimulationError("mc: negative jump rate at " + point_str(y));
            s += rates[c];
        }
        return s;
    };
    auto apply_jump = [&](std::size_t c) {
        m.jumps[c].size(x, size);
        for (std::size_t i = 0; i < d; ++i) x[i] += size[i];
        ++st.jumps;
    };
    auto absorb_check = [&]() {
        if (m.has_absorption() && x[0] < m.absorb_below) {
            x[0] = m.box->lo[0];
            st.absorbed = true;
        }
        return st.absorbed;
    };

    for (std::size_t k = 0; k < n; ++k) {
        if (hook) (*hook)(x, h);
        // compensated drift: b - sum rate * size
        m.drift(x, b);
        const double lam = rate_sum(x);
        for (std::size_t c = 0; c < m.jumps.size(); ++c) {
            if (rates[c] == 0.0) continue;
            m.jumps[c].size(x, size);
            for (std::size_t i = 0; i < d; ++i) b[i] -= rates[c] * size[i];
        }
        if (cfg.mode == JumpMode::thinning && lam > bound * (1.0 + 1e-12))
            throw SimulationError("mc: intensity bound " + std::to_string(bound) + " exceeded at " + point_str(x));
        diffusion_factor(m, x, a, S);
        for (std::size_t i = 0; i < d; ++i) dw[i] = gauss(rng) * sqh;
        for (std::size_t i = 0; i < d; ++i) {
            double s = b[i] * h;
            for (std::size_t j = 0; j < d; ++j) s += S[i * d + j] * dw[j];
            x[i] += s;
        }
        if (m.box && reflect(*m.box, x)) ++st.clamps;
        if (absorb_check()) break;

        if (!m.jumps.empty()) {
            if (cfg.mode == JumpMode::thinning) {
                if (bound > 0.0) {
                    std::poisson_distribution<long> pois(bound * h);
                    const long cand = pois(rng);
                    for (long e = 0; e < cand; ++e) {
                        const double tot = rate_sum(x);
                        if (tot > bound * (1.0 + 1e-12))
                            throw SimulationError("mc: intensity bound " + std::to_string(bound) +
                                                  " exceeded at " + point_str(x));
                        double v = unif(rng) * bound;
                        for (std::size_t c = 0; c < m.jumps.size(); ++c) {
                            if (v < rates[c]) {
                                apply_jump(c);
                                break;
                            }
                            v -= rates[c];
                        }
                    }
                }
            } else {
                rate_sum(x);
                const std::vector<double> r = rates;
                for (std::size_t c = 0; c < m.jumps.size(); ++c) {
                    if (r[c] > 0.0 && unif(rng) < -std::expm1(-r[c] * h)) apply_jump(c);
                }
            }
            if (absorb_check()) break;
        }
    }
    if (m.box && !m.box->contains(x, 1e-12)) st.exited = true;
}

struct PathResult {
    cplx value;
    PathStats st;
};

template <class PerPath>
McEstimate run_paths(const PathModel& m, std::span<const double> x0, double T, const McConfig& cfg,
                     PerPath&& per_path) {
    validate_config(m, x0, T, cfg);
    double bound = cfg.intensity_bound;
    if (cfg.mode == JumpMode::thinning && bound == 0.0) {
        for (const auto& c : m.jumps) bound += 2.0 * c.rate(x0);
    }
    std::vector<PathResult> res(cfg.paths);
    const unsigned nt = std::min<std::size_t>(mc_thread_count(cfg), cfg.paths);
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> x;
        for (std::size_t p = begin; p < end; ++p) {
            std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(p)));
            res[p] = per_path(rng, x, bound);
        }
    };
    if (nt <= 1) {
        work(0, cfg.paths);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(nt);
        const std::size_t chunk = (cfg.paths + nt - 1) / nt;
        for (unsigned t = 0; t < nt; ++t) {
            const std::size_t b = t * chunk, e = std::min(cfg.paths, b + chunk);
            pool.emplace_back([&, b, e, t] {
                try {
                    work(b, e);
                } catch (...) {
                    errs[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    McEstimate est;
    est.paths = cfg.paths;
    est.dt = T == 0.0 ? 0.0 : T / std::ceil(T / cfg.dt - 1e-9);
    const double np = static_cast<double>(cfg.paths);
    // shifted by the first sample: exact for constant outputs
    const cplx ref = res.front().value;
    cplx sum = 0.0;
    double jsum = 0.0;
    for (const auto& r : res) {
        sum += r.value - ref;
        jsum += static_cast<double>(r.st.jumps);
        est.clamp_count += r.st.clamps;
        est.exit_count += r.st.exited;
        est.absorbed_count += r.st.absorbed;
    }
    est.mean = ref + sum / np;
    est.jumps_per_path = jsum / np;
    double var = 0.0, jvar = 0.0;
    const cplx dm = sum / np;
    for (const auto& r : res) {
        var += std::norm(r.value - ref - dm);
        const double dj = static_cast<double>(r.st.jumps) - est.jumps_per_path;
        jvar += dj * dj;
    }
    if (cfg.paths > 1) {
        est.std_error = std::sqrt(var / (np - 1.0) / np);
        est.jumps_stderr = std::sqrt(jvar / (np - 1.0) / np);
    }
    return est;
}

}  // namespace

PathModel path_model(const Characteristics& chr) {
    chr.validate();
    const std::size_t d = chr.dim();
    PathModel m;
    m.dim = d;
    std::vector<TermEval> b;
    for (const auto& s : chr.drift) b.emplace_back(s);
    m.drift = [b](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i](x);
    };
    std::vector<TermEval> a;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a.emplace_back(chr.diffusion(i, j));
    m.diffusion = [a](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i](x);
    };
    if (chr.has_jumps() && !chr.has_kernel()) {
        throw ValidationError("mc: simulation needs a finite-atomic kernel, not supplied moments");
    }
    for (const auto& k : chr.kernels) {
        TermEval lam(k.intensity);
        for (const auto& atom : k.atoms) {
            if (atom.weight == 0.0) continue;
            std::vector<TermEval> j;
            for (const auto& s : atom.jump_size) j.emplace_back(s);
            const double w = atom.weight;
            m.jumps.push_back({[lam, w](std::span<const double> x) { return w * lam(x); },
                               [j](std::span<const double> x, std::span<double> out) {
                                   for (std::size_t i = 0; i < j.size(); ++i) out[i] = j[i](x);
                               }});
        }
    }
    return m;
}

Evaluable evaluable_from_series(const CoeffSeries& u) {
    return {[u](std::span<const double> x) { return eval(u, x); }, {}, {}};
}

Evaluable evaluable_exp_series(const CoeffSeries& u) {
    return {[u](std::span<const double> x) { return std::exp(eval(u, x)); }, {}, {}};
}

GeneratorTerms pointwise_generator_terms(const PathModel& m, const Evaluable& f, std::span<const double> x) {
    const std::size_t d = m.dim;
    if (x.size() != d) throw ValidationError("pointwiseGenerator: dimension mismatch");
    std::vector<cplx> g(d), H(d * d);
    if (f.gradient)
        f.gradient(x, g);
    else
        fd_gradient(f, x, g);
    if (f.hessian)
        f.hessian(x, H);
    else
        fd_hessian(f, x, H);
    std::vector<double> b(d), a(d * d), size(d), y(d);
    m.drift(x, b);
    m.diffusion(x, a);
    GeneratorTerms t;
    for (std::size_t i = 0; i < d; ++i) {
        const cplx v = b[i] * g[i];
        t.drift += v;
        t.scale += std::abs(v);
    }
    for (std::size_t i = 0; i < d * d; ++i) {
        const cplx v = 0.5 * a[i] * H[i];
        t.diffusion += v;
        t.scale += std::abs(v);
    }
    if (!m.jumps.empty()) {
        const cplx f0 = f.value(x);
        for (const auto& c : m.jumps) {
            const double r = c.rate(x);
            if (r == 0.0) continue;
            c.size(x, size);
            cplx lin = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                y[i] = x[i] + size[i];
                lin += g[i] * size[i];
            }
            const cplx fy = f.value(y);
            t.jump += r * (fy - f0 - lin);
            t.scale += r * (std::abs(fy) + std::abs(f0) + std::abs(lin));
        }
    }
    return t;
}

cplx pointwise_generator(const PathModel& m, const Evaluable& f, std::span<const double> x) {
    return pointwise_generator_terms(m, f, x).total();
}

unsigned mc_thread_count(const McConfig& cfg) {
    unsigned n = cfg.threads;
    if (n == 0) {
        n = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("HOLOSEQ_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
        }
    }
    return n;
}

McEstimate simulate_expectation(const PathModel& m, const PathFn& h, std::span<const double> x0, double T,
                                const McConfig& cfg) {
    return run_paths(m, x0, T, cfg, [&](std::mt19937_64& rng, std::vector<double>& x, double bound) {
        PathResult r;
        run_path(m, x0, T, cfg, bound, rng, x, r.st, nullptr);
        r.value = h(x);
        return r;
    });
}

McEstimate simulate_expectation(const Characteristics& chr, const PathFn& h, std::span<const double> x0,
                                double T, const McConfig& cfg) {
    return simulate_expectation(path_model(chr), h, x0, T, cfg);
}

McEstimate martingale_audit(const PathModel& m, const Evaluable& f, std::span<const double> x0, double T,
                            const McConfig& cfg) {
    const cplx f0 = f.value(x0);
    return run_paths(m, x0, T, cfg, [&](std::mt19937_64& rng, std::vector<double>& x, double bound) {
        PathResult r;
        cplx integral = 0.0;
        StepHook hook = [&](std::span<const double> y, double h) { integral += pointwise_generator(m, f, y) * h; };
        run_path(m, x0, T, cfg, bound, rng, x, r.st, &hook);
        r.value = f.value(x) - f0 - integral;
        return r;
    });
}

}  // namespace holoseq
