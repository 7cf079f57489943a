#pragma once

// Dense reductions used by quadrature accumulation and the Krylov solvers.
// Each kernel has a scalar reference and SIMD variants; the variant is
// picked once at startup from CPUID (override with WHODGE_SIMD=scalar).

#include <cstddef>

namespace whodge::kernels {

enum class Isa { scalar, avx2, neon };

Isa active_isa();
const char* isa_name(Isa isa);
bool isa_available(Isa isa);
// Testing hook. Throws if the ISA is not available on this machine.
void force_isa(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
// sum_i w[i] * a[i] * b[i]
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = x + beta * y
void xpby(const double* x, double beta, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
}  // namespace neon
#endif

}  // namespace whodge::kernels
