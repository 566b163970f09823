#include "backends.hpp"

#if defined(EMSLAB_HAVE_AVX2_BUILD)

#include <immintrin.h>

// 4-wide double kernels. Compiled with -mavx2 -mfma; dispatch.cpp only
// routes here when the CPU reports both features.
namespace emslab::kernels::avx2 {

namespace {

// Sum of the four lanes of an __m256d.
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_fmadd_pd(va, vb, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        tail += a[i] * b[i];
    }
    return hsum(acc) + tail;
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double acc = dot(w + r * cols, x, cols);
        y[r] = bias ? acc + bias[r] : acc;
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void soft_update(double tau, const double* src, double* dst, std::size_t n) {
    const __m256d one_minus_tau = _mm256_set1_pd(1.0 - tau);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vs = _mm256_loadu_pd(src + i);
        __m256d vd = _mm256_loadu_pd(dst + i);
        __m256d diff = _mm256_sub_pd(vd, vs);
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(one_minus_tau, diff, vs));
    }
    for (; i < n; ++i) {
        dst[i] = src[i] + (1.0 - tau) * (dst[i] - src[i]);
    }
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d v1mb1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d v1mb2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vc1 = _mm256_set1_pd(inv_bc1);
    const __m256d vc2 = _mm256_set1_pd(inv_bc2);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);

        vm = _mm256_fmadd_pd(vb1, vm, _mm256_mul_pd(v1mb1, vg));
        vv = _mm256_fmadd_pd(vb2, vv, _mm256_mul_pd(v1mb2, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);

        __m256d mhat = _mm256_mul_pd(vm, vc1);
        __m256d vhat = _mm256_mul_pd(vv, vc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d stepv = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);

        __m256d vp = _mm256_loadu_pd(p + i);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(vp, stepv));
    }
    // scalar tail matches the reference expression exactly
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] * inv_bc1;
        const double vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (__builtin_sqrt(vhat) + eps);
    }
}

} // namespace emslab::kernels::avx2

#endif // EMSLAB_HAVE_AVX2_BUILD
