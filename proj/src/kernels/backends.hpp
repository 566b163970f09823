#pragma once
#include <cstddef>

// Internal declarations for the SIMD backends. Only compiled-in variants
// are defined; dispatch.cpp checks CPU support before routing to them.
namespace emslab::kernels {

#if defined(__x86_64__) || defined(_M_X64)
#define EMSLAB_HAVE_AVX2_BUILD 1
namespace avx2 {
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void soft_update(double tau, const double* src, double* dst, std::size_t n);
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2);
} // namespace avx2
#endif

#if defined(__aarch64__)
#define EMSLAB_HAVE_NEON_BUILD 1
namespace neon {
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* bias, double* y);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void soft_update(double tau, const double* src, double* dst, std::size_t n);
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2);
} // namespace neon
#endif

} // namespace emslab::kernels
