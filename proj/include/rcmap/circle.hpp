#pragma once

#include <cmath>

namespace rcmap {

// Reduce to [0, 1). The guard handles the case where rounding in
// x - floor(x) lands exactly on 1.
inline double mod1(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

// Distance on the circle, in [0, 1/2].
inline double circ_dist(double x, double y) {
  double d = std::fabs(mod1(x) - mod1(y));
  return d > 0.5 ? 1.0 - d : d;
}

}  // namespace rcmap
