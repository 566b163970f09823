#include "emslab/kernels/kernels.hpp"

#include "backends.hpp"
#include "emslab/errors.hpp"

namespace emslab::kernels {

namespace {

struct Vtable {
    void (*gemv)(const double*, std::size_t, std::size_t, const double*,
                 const double*, double*);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*soft_update)(double, const double*, double*, std::size_t);
    void (*adam_update)(double*, double*, double*, const double*, std::size_t,
                        double, double, double, double, double, double);
};

constexpr Vtable kScalar{scalar::gemv, scalar::axpy, scalar::dot,
                         scalar::soft_update, scalar::adam_update};

#if defined(EMSLAB_HAVE_AVX2_BUILD)
constexpr Vtable kAvx2{avx2::gemv, avx2::axpy, avx2::dot, avx2::soft_update,
                       avx2::adam_update};
#endif
#if defined(EMSLAB_HAVE_NEON_BUILD)
constexpr Vtable kNeon{neon::gemv, neon::axpy, neon::dot, neon::soft_update,
                       neon::adam_update};
#endif

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(EMSLAB_HAVE_AVX2_BUILD)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(EMSLAB_HAVE_NEON_BUILD)
            return true;  // baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

Backend pick_default() {
    if (cpu_supports(Backend::avx2)) return Backend::avx2;
    if (cpu_supports(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

const Vtable* table_for(Backend b) {
    switch (b) {
#if defined(EMSLAB_HAVE_AVX2_BUILD)
        case Backend::avx2:
            return &kAvx2;
#endif
#if defined(EMSLAB_HAVE_NEON_BUILD)
        case Backend::neon:
            return &kNeon;
#endif
        default:
            return &kScalar;
    }
}

struct State {
    Backend backend = pick_default();
    const Vtable* vt = table_for(pick_default());
};

State& state() {
    static State s;
    return s;
}

} // namespace

Backend active_backend() { return state().backend; }

bool backend_supported(Backend b) { return cpu_supports(b); }

void set_backend(Backend b) {
    if (!cpu_supports(b)) {
        fail(ErrorCategory::argument,
             std::string("kernel backend not supported on this host: ") +
                 backend_name(b));
    }
    state().backend = b;
    state().vt = table_for(b);
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y) {
    state().vt->gemv(w, rows, cols, x, bias, y);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    state().vt->axpy(alpha, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
    return state().vt->dot(a, b, n);
}

void soft_update(double tau, const double* src, double* dst, std::size_t n) {
    state().vt->soft_update(tau, src, dst, n);
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2) {
    state().vt->adam_update(p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1,
                            inv_bc2);
}

} // namespace emslab::kernels
