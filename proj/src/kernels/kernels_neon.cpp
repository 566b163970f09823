#include "backends.hpp"

#if defined(EMSLAB_HAVE_NEON_BUILD)

#include <arm_neon.h>
#include <cmath>

// 2-wide double kernels for aarch64. NEON is baseline there, so no extra
// compile flags or runtime feature check are required.
namespace emslab::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        tail += a[i] * b[i];
    }
    return vaddvq_f64(acc) + tail;
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double acc = dot(w + r * cols, x, cols);
        y[r] = bias ? acc + bias[r] : acc;
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void soft_update(double tau, const double* src, double* dst, std::size_t n) {
    const float64x2_t one_minus_tau = vdupq_n_f64(1.0 - tau);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vs = vld1q_f64(src + i);
        float64x2_t vd = vld1q_f64(dst + i);
        float64x2_t diff = vsubq_f64(vd, vs);
        vst1q_f64(dst + i, vfmaq_f64(vs, one_minus_tau, diff));
    }
    for (; i < n; ++i) {
        dst[i] = src[i] + (1.0 - tau) * (dst[i] - src[i]);
    }
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2) {
    const float64x2_t vb1 = vdupq_n_f64(beta1);
    const float64x2_t vb2 = vdupq_n_f64(beta2);
    const float64x2_t v1mb1 = vdupq_n_f64(1.0 - beta1);
    const float64x2_t v1mb2 = vdupq_n_f64(1.0 - beta2);
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t veps = vdupq_n_f64(eps);
    const float64x2_t vc1 = vdupq_n_f64(inv_bc1);
    const float64x2_t vc2 = vdupq_n_f64(inv_bc2);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vg = vld1q_f64(g + i);
        float64x2_t vm = vld1q_f64(m + i);
        float64x2_t vv = vld1q_f64(v + i);

        vm = vfmaq_f64(vmulq_f64(v1mb1, vg), vb1, vm);
        vv = vfmaq_f64(vmulq_f64(v1mb2, vmulq_f64(vg, vg)), vb2, vv);
        vst1q_f64(m + i, vm);
        vst1q_f64(v + i, vv);

        float64x2_t mhat = vmulq_f64(vm, vc1);
        float64x2_t vhat = vmulq_f64(vv, vc2);
        float64x2_t denom = vaddq_f64(vsqrtq_f64(vhat), veps);
        float64x2_t stepv = vdivq_f64(vmulq_f64(vlr, mhat), denom);

        vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), stepv));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] * inv_bc1;
        const double vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace emslab::kernels::neon

#endif // EMSLAB_HAVE_NEON_BUILD
