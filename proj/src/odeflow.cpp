#include "holoseq/odeflow.hpp"

#include <cmath>
#include <ostream>

#include "holoseq/errors.hpp"
#include "holoseq/series_io.hpp"

namespace holoseq {

namespace {

template <class Apply>
SequenceFlow solve(FlowKind kind, const CoeffSeries& u0, int working_order, const OdeConfig& cfg, Apply&& apply) {
    cfg.validate();
    const int trust = std::min(u0.trusted_degree(), working_order);
    auto rhs = [&](double, const CoeffSeries& y) {
        CoeffSeries d = apply(y);
        for (std::size_t a = 0; a < d.size(); ++a)
            if (!std::isfinite(d[a].real()) || !std::isfinite(d[a].imag()))
                throw NumericalError("ode: non-finite derivative");
        d.set_trusted_degree(trust);
        return d;
    };
    CoeffSeries y0 = u0;
    y0.set_trusted_degree(trust);
    const double r = cfg.r_ref;
    auto norm = [r](const CoeffSeries& y) { return abs_norm(y, r); };
    OdeTrajectory<CoeffSeries> tr = cfg.method == OdeMethod::rk4
                                        ? integrate_rk4(rhs, std::move(y0), cfg.t_end, cfg.step)
                                        : integrate_rk45(rhs, std::move(y0), cfg, norm);
    SequenceFlow f;
    f.kind = kind;
    f.times = std::move(tr.times);
    f.snapshots = std::move(tr.states);
    f.rhs_evaluations = tr.rhs_evaluations;
    f.rejected_steps = tr.rejected_steps;
    for (auto& s : f.snapshots) s.set_trusted_degree(std::min(s.trusted_degree(), trust));
    return f;
}

void check_u0(const CoeffSeries& u0, std::size_t dim, int order) {
    if (u0.empty() || u0.dim() != dim || u0.order() != order)
        throw ValidationError("ode: initial series has mismatched dim/order");
}

double tail_mass(const CoeffSeries& c, std::span<const double> x0) {
    std::vector<double> r(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) r[i] = std::abs(x0[i]);
    if (c.trusted_degree() >= c.order()) return 0.0;
    return abs_norm_range(c, r, c.trusted_degree() + 1, c.order());
}

}  // namespace

SequenceFlow solve_linear(const LinearOperator& op, const CoeffSeries& u0, const OdeConfig& cfg) {
    check_u0(u0, op.dim(), op.order());
    return solve(FlowKind::linear, u0, op.config().working_order, cfg,
                 [&](const CoeffSeries& y) { return op.apply(y); });
}

SequenceFlow solve_riccati(const RiccatiOperator& op, const CoeffSeries& u0, const OdeConfig& cfg) {
    check_u0(u0, op.linear().dim(), op.linear().order());
    return solve(FlowKind::riccati, u0, op.config().working_order, cfg,
                 [&](const CoeffSeries& y) { return op.apply(y); });
}

SequenceFlow riccati_from_linear(const LinearOperator& op, const CoeffSeries& u0, const OdeConfig& cfg,
                                 const LogOptions& log_opt) {
    check_u0(u0, op.dim(), op.order());
    SequenceFlow lin = solve_linear(op, exp_star(u0), cfg);
    SequenceFlow out;
    out.kind = FlowKind::riccati;
    out.times = lin.times;
    out.rhs_evaluations = lin.rhs_evaluations;
    out.rejected_steps = lin.rejected_steps;
    cplx phi = u0[0];
    cplx prev = lin.snapshots.front()[0];
    for (std::size_t k = 0; k < lin.snapshots.size(); ++k) {
        const CoeffSeries& c = lin.snapshots[k];
        const cplx c0 = c[0];
        if (!(std::abs(c0) > log_opt.eps_div))
            throw VanishingCoefficientError("riccatiFromLinear: |c(t)_0| below threshold at t = " +
                                                std::to_string(lin.times[k]),
                                            lin.times[k]);
        if (k > 0) phi += std::log(c0 / prev);
        prev = c0;
        CoeffSeries psi = k == 0 ? u0 : log_star(c, phi, log_opt);
        psi.set_trusted_degree(c.trusted_degree());
        out.snapshots.push_back(std::move(psi));
    }
    return out;
}

FlowValue holomorphic_expectation(const SequenceFlow& flow, std::span<const double> x0) {
    if (flow.kind != FlowKind::linear) throw ValidationError("holomorphicExpectation: needs a linear flow");
    const CoeffSeries& c = flow.final_state();
    if (x0.size() != c.dim()) throw ValidationError("holomorphicExpectation: x0 dimension mismatch");
    return {eval(c, x0), tail_mass(c, x0), c.trusted_degree()};
}

FlowValue affine_expectation(const SequenceFlow& flow, std::span<const double> x0) {
    if (flow.kind != FlowKind::riccati) throw ValidationError("affineExpectation: needs a Riccati flow");
    const CoeffSeries& psi = flow.final_state();
    if (x0.size() != psi.dim()) throw ValidationError("affineExpectation: x0 dimension mismatch");
    return {std::exp(eval(psi, x0)), tail_mass(psi, x0), psi.trusted_degree()};
}

void write_flow_csv(std::ostream& os, const SequenceFlow& flow) {
    if (flow.snapshots.empty()) return;
    const IndexSpace& sp = flow.snapshots.front().space();
    os << 't';
    for (std::size_t a = 0; a < sp.size(); ++a) {
        std::string label;
        auto e = sp.exponents(a);
        for (std::size_t i = 0; i < e.size(); ++i) label += (i ? ":" : "") + std::to_string(e[i]);
        os << ",re[" << label << "],im[" << label << ']';
    }
    os << '\n';
    for (std::size_t k = 0; k < flow.times.size(); ++k) {
        os << format_double(flow.times[k]);
        for (std::size_t a = 0; a < sp.size(); ++a) {
            const cplx v = flow.snapshots[k][a];
            os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
        }
        os << '\n';
    }
}

}  // namespace holoseq
