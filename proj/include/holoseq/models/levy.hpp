#pragma once

#include <vector>

#include "holoseq/characteristics.hpp"

namespace holoseq {

struct LevyAtom {
    double weight = 0.0;
    double jump = 0.0;
};

/// One-dimensional Levy triplet with an atomic jump measure F.
struct LevySpec {
    double b = 0.0;
    double a = 0.0;
    std::vector<LevyAtom> atoms;

    void validate() const;
};

/// b tau + a tau^2 / 2 + sum w (e^{tau y} - 1 - tau y)
cplx levy_exponent(const LevySpec& spec, cplx tau);

/// Constant series b, a; unit intensity with constant jump sizes. No kernel
/// when there are no atoms.
Characteristics levy_characteristics(const LevySpec& spec, int order);

}  // namespace holoseq
