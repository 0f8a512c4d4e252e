#include <arm_neon.h>

#include "holoseq/kernels.hpp"

namespace holoseq::kernels::neon {
namespace {

cplx gather_dot(const double* w, const cplx* a, const cplx* b, const std::uint32_t* ia,
                const std::uint32_t* ib, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    float64x2_t acc_r = vdupq_n_f64(0.0), acc_i = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const float64x2_t x = vmulq_n_f64(vld1q_f64(ad + 2 * ia[k]), w[k]);
        const float64x2_t y = vld1q_f64(bd + 2 * ib[k]);
        acc_r = vfmaq_laneq_f64(acc_r, x, y, 0);
        acc_i = vfmaq_laneq_f64(acc_i, x, y, 1);
    }
    return {vgetq_lane_f64(acc_r, 0) - vgetq_lane_f64(acc_i, 1),
            vgetq_lane_f64(acc_r, 1) + vgetq_lane_f64(acc_i, 0)};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const float64x2_t ar = vdupq_n_f64(alpha.real());
    const double ai_pair[2] = {-alpha.imag(), alpha.imag()};
    const float64x2_t ai = vld1q_f64(ai_pair);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xd + 2 * i);
        float64x2_t yv = vld1q_f64(yd + 2 * i);
        yv = vfmaq_f64(yv, xv, ar);
        yv = vfmaq_f64(yv, vextq_f64(xv, xv, 1), ai);
        vst1q_f64(yd + 2 * i, yv);
    }
}

void scale_real(const cplx* x, const double* s, cplx* out, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* od = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        vst1q_f64(od + 2 * i, vmulq_n_f64(vld1q_f64(xd + 2 * i), s[i]));
    }
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{"neon", &gather_dot, &axpy, &scale_real};
    return t;
}

}  // namespace holoseq::kernels::neon
