#include "holoseq/kernels.hpp"

namespace holoseq::kernels {
namespace {

cplx gather_dot(const double* w, const cplx* a, const cplx* b, const std::uint32_t* ia,
                const std::uint32_t* ib, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xr = w[k] * a[ia[k]].real(), xi = w[k] * a[ia[k]].imag();
        const cplx y = b[ib[k]];
        re += xr * y.real() - xi * y.imag();
        im += xr * y.imag() + xi * y.real();
    }
    return {re, im};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
    }
}

void scale_real(const cplx* x, const double* s, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {x[i].real() * s[i], x[i].imag() * s[i]};
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", &gather_dot, &axpy, &scale_real};
    return table;
}

}  // namespace holoseq::kernels
