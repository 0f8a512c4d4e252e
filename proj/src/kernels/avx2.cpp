// Built with -mavx2 -mfma. Only reached after a runtime CPU check.
#include <immintrin.h>

#include "holoseq/kernels.hpp"

namespace holoseq::kernels::avx2 {
namespace {

inline __m256d load_pair(const cplx* p, std::uint32_t i, std::uint32_t j) {
    const double* base = reinterpret_cast<const double*>(p);
    return _mm256_set_m128d(_mm_loadu_pd(base + 2 * j), _mm_loadu_pd(base + 2 * i));
}

// acc_r holds (xr*yr, xi*yr), acc_i holds (xr*yi, xi*yi) per lane
inline cplx finish(__m256d acc_r, __m256d acc_i) {
    alignas(32) double r[4], q[4];
    _mm256_store_pd(r, acc_r);
    _mm256_store_pd(q, acc_i);
    return {(r[0] + r[2]) - (q[1] + q[3]), (r[1] + r[3]) + (q[0] + q[2])};
}

inline __m256d load_weights(const double* w) {
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w)), 0x50);
}

cplx gather_dot(const double* w, const cplx* a, const cplx* b, const std::uint32_t* ia,
                const std::uint32_t* ib, std::size_t n) {
    __m256d acc_r0 = _mm256_setzero_pd(), acc_i0 = _mm256_setzero_pd();
    __m256d acc_r1 = _mm256_setzero_pd(), acc_i1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d x0 = _mm256_mul_pd(load_weights(w + k), load_pair(a, ia[k], ia[k + 1]));
        const __m256d y0 = load_pair(b, ib[k], ib[k + 1]);
        const __m256d x1 = _mm256_mul_pd(load_weights(w + k + 2), load_pair(a, ia[k + 2], ia[k + 3]));
        const __m256d y1 = load_pair(b, ib[k + 2], ib[k + 3]);
        acc_r0 = _mm256_fmadd_pd(x0, _mm256_movedup_pd(y0), acc_r0);
        acc_i0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0xF), acc_i0);
        acc_r1 = _mm256_fmadd_pd(x1, _mm256_movedup_pd(y1), acc_r1);
        acc_i1 = _mm256_fmadd_pd(x1, _mm256_permute_pd(y1, 0xF), acc_i1);
    }
    for (; k + 2 <= n; k += 2) {
        const __m256d x0 = _mm256_mul_pd(load_weights(w + k), load_pair(a, ia[k], ia[k + 1]));
        const __m256d y0 = load_pair(b, ib[k], ib[k + 1]);
        acc_r0 = _mm256_fmadd_pd(x0, _mm256_movedup_pd(y0), acc_r0);
        acc_i0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0xF), acc_i0);
    }
    cplx out = finish(_mm256_add_pd(acc_r0, acc_r1), _mm256_add_pd(acc_i0, acc_i1));
    if (k < n) {
        const cplx x = w[k] * a[ia[k]], y = b[ib[k]];
        out += cplx(x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real());
    }
    return out;
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set_pd(alpha.imag(), -alpha.imag(), alpha.imag(), -alpha.imag());
    double* yd = reinterpret_cast<double*>(y);
    const double* xd = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        yv = _mm256_fmadd_pd(xv, ar, yv);
        yv = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0x5), ai, yv);
        _mm256_storeu_pd(yd + 2 * i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_real(const cplx* x, const double* s, cplx* out, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* od = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d sv = load_weights(s + i);
        _mm256_storeu_pd(od + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i), sv));
    }
    for (; i < n; ++i) out[i] = {x[i].real() * s[i], x[i].imag() * s[i]};
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{"avx2", &gather_dot, &axpy, &scale_real};
    return t;
}

}  // namespace holoseq::kernels::avx2
