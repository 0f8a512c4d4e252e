#pragma once

#include <string>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/models/affine.hpp"
#include "holoseq/models/chain.hpp"
#include "holoseq/models/levy.hpp"
#include "holoseq/models/unit_interval.hpp"
#include "holoseq/montecarlo.hpp"

namespace holoseq {

enum class PresetKind { levy, chain, affine, unit_interval };

/**
 * @brief A named model with its oracle data.
 *
 * Only the member matching `kind` is meaningful. `grid` holds five states
 * used for generator checks (the chain presets use their states, padded
 * with interior points).
 */
struct Preset {
    std::string name;
    std::string summary;
    PresetKind kind = PresetKind::levy;
    LevySpec levy;
    FiniteChain chain;
    AffineSpec affine;
    UnitIntervalModel unit;
    std::vector<std::vector<double>> grid;
    std::vector<double> x0;
    /// two-state-affine: the values u_i = h_u(x_i) of the closed-form example
    std::vector<double> chain_u;

    Characteristics characteristics(int order) const;
    PathModel path_model() const;
};

/// All presets, sorted by name.
const std::vector<Preset>& preset_registry();
/// Throws ValidationError naming the unknown preset.
const Preset& find_preset(const std::string& name);

}  // namespace holoseq
