#pragma once

#include <string>

namespace whodge {

// Shortest round-trip decimal form; "inf"/"-inf" for infinities.
std::string format_real(double v);
// Accepts decimal numbers and "inf"/"+inf"/"-inf".
double parse_extended_real(const std::string& s);
// Worker count from WHODGE_THREADS (default 1).
int thread_count();

}  // namespace whodge
