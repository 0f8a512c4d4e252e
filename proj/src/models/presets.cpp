#include "holoseq/models/presets.hpp"

#include <algorithm>
#include <cmath>

#include "holoseq/errors.hpp"

namespace holoseq {

Characteristics Preset::characteristics(int order) const {
    switch (kind) {
        case PresetKind::levy:
            return levy_characteristics(levy, order);
        case PresetKind::chain:
            return chain_characteristics(chain, order);
        case PresetKind::affine:
            return affine_characteristics(affine, order);
        case PresetKind::unit_interval:
            return unit_interval_characteristics(order);
    }
    throw ValidationError("preset: unknown kind");
}

PathModel Preset::path_model() const {
    switch (kind) {
        case PresetKind::chain:
            return chain_path_model(chain);
        case PresetKind::unit_interval:
            return unit_interval_path_model(unit);
        default:
            return holoseq::path_model(characteristics(4));
    }
}

namespace {

std::vector<Preset> build() {
    std::vector<Preset> out;
    const std::vector<std::vector<double>> line{{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}};

    Preset bm;
    bm.name = "bm";
    bm.summary = "Brownian motion: b = 0, a = 1, no jumps";
    bm.levy = {0.0, 1.0, {}};
    bm.grid = line;
    bm.x0 = {0.0};
    out.push_back(bm);

    Preset cp;
    cp.name = "compound-poisson";
    cp.summary = "Levy: b = 0, a = 1, F = delta_{0.5} + delta_{-0.5}";
    cp.levy = {0.0, 1.0, {{1.0, 0.5}, {1.0, -0.5}}};
    cp.grid = line;
    cp.x0 = {0.0};
    out.push_back(cp);

    Preset fc;
    fc.name = "finite-chain";
    fc.summary = "3-state chain on {0, 0.5, 1}";
    fc.kind = PresetKind::chain;
    fc.chain.states = {{0.0}, {0.5}, {1.0}};
    fc.chain.rates.resize(3, 3);
    fc.chain.rates << 0.0, 1.0, 0.5, 0.3, 0.0, 0.7, 0.2, 0.4, 0.0;
    fc.grid = {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}};
    fc.x0 = {0.0};
    out.push_back(fc);

    Preset ts;
    ts.name = "two-state-affine";
    ts.summary = "2-state chain on {0, 1}, lambda_12 = lambda_21 = 1, u = (0, log 2)";
    ts.kind = PresetKind::chain;
    ts.chain.states = {{0.0}, {1.0}};
    ts.chain.rates.resize(2, 2);
    ts.chain.rates << 0.0, 1.0, 1.0, 0.0;
    ts.grid = {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}};
    ts.x0 = {0.0};
    ts.chain_u = {0.0, std::log(2.0)};
    out.push_back(ts);

    Preset af;
    af.name = "affine-linear-jumps";
    af.summary = "affine: b = 0.1 + 0.2x, a = 0.3, nu0 = 0.8 delta_{0.25} + 0.4 delta_{-0.5}, nu1 = 0";
    af.kind = PresetKind::affine;
    af.affine.b0 = 0.1;
    af.affine.b1 = 0.2;
    af.affine.a0 = 0.3;
    af.affine.nu0 = {{0.8, 0.25}, {0.4, -0.5}};
    af.grid = line;
    af.x0 = {0.0};
    out.push_back(af);

    Preset ui;
    ui.name = "unit-interval";
    ui.summary = "[0,1] martingale: a = x(1-x)(1-x/2), jump to 0 at rate (1-x)(1-x/2)/x; K_max = 200";
    ui.kind = PresetKind::unit_interval;
    ui.grid = {{0.1}, {0.3}, {0.5}, {0.7}, {0.9}};
    ui.x0 = {0.5};
    out.push_back(ui);

    std::sort(out.begin(), out.end(), [](const Preset& a, const Preset& b) { return a.name < b.name; });
    return out;
}

}  // namespace

const std::vector<Preset>& preset_registry() {
    static const std::vector<Preset> reg = build();
    return reg;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : preset_registry())
        if (p.name == name) return p;
    throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace holoseq
