#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace holoseq::kernels {

using cplx = std::complex<double>;

/**
 * @brief Table of low-level complex kernels.
 *
 * One table per instruction set. All variants compute the same sums; they
 * may differ in the last bits because the accumulation order differs.
 */
struct KernelTable {
    const char* name;

    /// sum_k w[k] * a[ia[k]] * b[ib[k]]
    cplx (*gather_dot)(const double* w, const cplx* a, const cplx* b, const std::uint32_t* ia,
                       const std::uint32_t* ib, std::size_t n);

    /// y[i] += alpha * x[i]
    void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);

    /// out[i] = x[i] * s[i]
    void (*scale_real)(const cplx* x, const double* s, cplx* out, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/**
 * @brief The table used by the series code.
 *
 * Picked once at first use: the best supported variant, unless the
 * environment variable HOLOSEQ_SIMD is set to "scalar".
 */
const KernelTable& active();

/// Override the selection (tests and benchmarks). Returns false if the
/// requested variant is unavailable; "auto" restores the default choice.
bool select(std::string_view name);

}  // namespace holoseq::kernels
