#pragma once

#include <utility>
#include <vector>

#include "holoseq/characteristics.hpp"
#include "holoseq/models/levy.hpp"
#include "holoseq/ode.hpp"

namespace holoseq {

/**
 * @brief One-dimensional affine jump-diffusion.
 *
 * b(x) = b0 + b1 x, a(x) = a0 + a1 x, K(x, .) = nu0 + x nu1 with atomic
 * (possibly signed) nu0, nu1. Positivity is checked on 101 points of
 * [lo, hi].
 */
struct AffineSpec {
    double b0 = 0.0, b1 = 0.0;
    double a0 = 0.0, a1 = 0.0;
    std::vector<LevyAtom> nu0, nu1;
    double lo = -1.0, hi = 1.0;

    void validate() const;
};

/// Jump values of nu0 and nu1 merged, with weights (w0, w1) per value.
struct MergedAtom {
    double jump;
    double w0, w1;
};
std::vector<MergedAtom> merged_atoms(const AffineSpec& spec);

/// One kernel per distinct jump value with intensity w0 + w1 z.
Characteristics affine_characteristics(const AffineSpec& spec, int order);

struct AffineExponents {
    cplx phi = 0.0;
    cplx psi = 0.0;
};

/**
 * @brief (phi, psi)(T) with E exp(u X_T) = exp(phi + psi x).
 *
 * psi' = b1 psi + a1 psi^2/2 + int (e^{psi xi} - 1 - psi xi) nu1,
 * phi' = the same with (b0, a0, nu0); phi(0) = 0, psi(0) = u.
 */
AffineExponents affine_transform(const AffineSpec& spec, cplx u, double T, double rel_tol = 1e-12);

}  // namespace holoseq
