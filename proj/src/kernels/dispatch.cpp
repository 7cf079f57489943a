#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "whodge/kernels.hpp"

namespace whodge::kernels {

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpby)(const double*, double, double*, std::size_t);
};

Table table_for(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2:
      return {Isa::avx2, avx2::dot, avx2::weighted_dot, avx2::axpy, avx2::xpby};
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return {Isa::neon, neon::dot, neon::weighted_dot, neon::axpy, neon::xpby};
#endif
    default:
      return {Isa::scalar, scalar::dot, scalar::weighted_dot, scalar::axpy, scalar::xpby};
  }
}

Isa detect() {
  const char* env = std::getenv("WHODGE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Table& current() {
  static Table t = table_for(detect());
  return t;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error(std::string("ISA not available: ") + isa_name(isa));
  current() = table_for(isa);
}

double dot(const double* a, const double* b, std::size_t n) { return current().dot(a, b, n); }
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  return current().weighted_dot(w, a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) { current().axpy(alpha, x, y, n); }
void xpby(const double* x, double beta, double* y, std::size_t n) { current().xpby(x, beta, y, n); }

}  // namespace whodge::kernels
