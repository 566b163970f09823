#pragma once
#include <cstddef>

// Data-parallel inner loops behind the neural-network stack: dense
// matrix-vector products, vector updates, and the optimizer step. Each
// kernel has a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected once at startup from CPU
// capabilities. Non-scalar backends are equivalence-tested against the
// scalar reference; results may differ from scalar by rounding only
// (FMA contraction, reassociated reductions).
namespace emslab::kernels {

enum class Backend { scalar, avx2, neon };

/// Backend currently routed through the dispatched entry points.
Backend active_backend();

/// True if this binary/CPU combination can run `b`.
bool backend_supported(Backend b);

/// Force a backend (tests use this to compare variants). Throws
/// Error(argument) when the backend is not supported here.
void set_backend(Backend b);

const char* backend_name(Backend b);

// ---------------------------------------------------------------------------
// Dispatched entry points
// ---------------------------------------------------------------------------

/// y = W x + b. W is row-major (rows x cols); bias may be null.
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y);

/// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);

/// dst = src + (1 - tau) * (dst - src): moves dst toward src by factor tau.
void soft_update(double tau, const double* src, double* dst, std::size_t n);

/// Adam step over one parameter array.
///   m = b1*m + (1-b1)*g ; v = b2*v + (1-b2)*g^2
///   p -= lr * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
/// inv_bc1/inv_bc2 are the precomputed bias corrections 1/(1-b1^t), 1/(1-b2^t).
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2);

// ---------------------------------------------------------------------------
// Scalar reference (always available; the ground truth for equivalence tests)
// ---------------------------------------------------------------------------
namespace scalar {
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void soft_update(double tau, const double* src, double* dst, std::size_t n);
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2);
} // namespace scalar

} // namespace emslab::kernels
