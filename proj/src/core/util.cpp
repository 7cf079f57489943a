#include "whodge/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "whodge/error.hpp"

namespace whodge {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_extended_real(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ValidationError("value", "not a real: " + s);
  return v;
}

int thread_count() {
  const char* env = std::getenv("WHODGE_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? std::min(n, 256) : 1;
}

}  // namespace whodge
