#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace cpsarch::detail {

/// Shortest decimal form of `v` that parses back to exactly the same
/// double. Integral values print without an exponent ("30", not "3e+01").
/// Keeps emitted files both readable and byte-deterministic.
inline std::string format_double(double v) {
  char buf[64];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace cpsarch::detail
