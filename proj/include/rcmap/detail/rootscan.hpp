#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rcmap/errors.hpp"

namespace rcmap::detail {

// Bisection on [lo, hi] assuming f(lo) and f(hi) straddle zero.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double fhi, double tol) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in doubles
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) != (fm < 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
std::size_t count_sign_changes(F&& f, std::size_t points) {
  std::size_t changes = 0;
  double f0 = f(0.0);
  double prev = f0;
  for (std::size_t j = 1; j <= points; ++j) {
    double cur = (j == points) ? f0 : f(static_cast<double>(j) / points);
    if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) ++changes;
    prev = cur;
  }
  return changes;
}

// Roots of a 1-periodic function on [0, 1), found by a uniform sign-change
// scan refined with bisection. With verify set, the scan is repeated at twice
// the resolution and a changed sign-change count raises ScanTooCoarse.
// Tangential (even-order) zeros are invisible to the scan on both passes.
template <class F>
std::vector<double> circle_roots(F&& f, std::size_t points, double tol,
                                 bool verify = true) {
  std::vector<double> vals(points);
  for (std::size_t j = 0; j < points; ++j)
    vals[j] = f(static_cast<double>(j) / points);

  std::vector<double> roots;
  for (std::size_t j = 0; j < points; ++j) {
    double x0 = static_cast<double>(j) / points;
    double x1 = static_cast<double>(j + 1) / points;
    double f0 = vals[j];
    double f1 = (j + 1 == points) ? vals[0] : vals[j + 1];
    if (f0 == 0.0) {
      roots.push_back(x0);
      continue;
    }
    if (f1 == 0.0) continue;  // claimed by the next interval
    if ((f0 < 0.0) != (f1 < 0.0))
      roots.push_back(bisect(f, x0, x1, f0, f1, tol));
  }

  if (verify) {
    std::size_t coarse = 0;
    double prev = vals[0];
    for (std::size_t j = 1; j <= points; ++j) {
      double cur = (j == points) ? vals[0] : vals[j];
      if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) ++coarse;
      prev = cur;
    }
    std::size_t fine = count_sign_changes(f, 2 * points);
    if (fine != coarse)
      throw ScanTooCoarse("root scan unstable under refinement: " +
                          std::to_string(coarse) + " vs " +
                          std::to_string(fine) + " sign changes");
  }

  std::sort(roots.begin(), roots.end());
  // collapse near-duplicates from grid-aligned zeros
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && r - out.back() < 10.0 * tol) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace rcmap::detail
