#pragma once

#include <cmath>

namespace rcmap::detail {

// log|t| with a hard floor: arguments below 1e-300 contribute log(1e-300),
// so a single machine-zero slope cannot produce -inf in a Birkhoff sum.
inline double floored_log_abs(double t) {
  static const double kLogFloor = std::log(1e-300);
  double at = std::fabs(t);
  return at < 1e-300 ? kLogFloor : std::log(at);
}

}  // namespace rcmap::detail
