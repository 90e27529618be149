#pragma once

// Brute-force reference implementations for tests. Everything here avoids
// the library's own RNG and quadrature paths on purpose: std::mt19937_64
// for sampling, plain midpoint sums for integrals.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rcmap/circle.hpp"
#include "rcmap/map.hpp"
#include "rcmap/transfer.hpp"

namespace oracle {

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
}

// Empirical row of the cell transition matrix: start uniform in cell i,
// kick uniform in [-eps, eps], count landings per cell.
inline std::vector<double> mc_transition_row(const rcmap::MapParams& p,
                                             double eps, std::size_t n_cells,
                                             std::size_t row,
                                             std::size_t n_samples,
                                             std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> mass(n_cells, 0.0);
  double w = 1.0 / static_cast<double>(n_cells);
  double lo = static_cast<double>(row) * w;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double x = uniform(gen, lo, lo + w);
    double y = rcmap::mod1(rcmap::eval_tau(p, x) + uniform(gen, -eps, eps));
    mass[static_cast<std::size_t>(y * static_cast<double>(n_cells))] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(n_samples);
  return mass;
}

// Normalized occupation histogram of one long kicked orbit.
inline std::vector<double> orbit_histogram(const rcmap::MapParams& p,
                                           double eps, std::size_t n_bins,
                                           std::size_t n_steps,
                                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> hist(n_bins, 0.0);
  double x = uniform(gen, 0.0, 1.0);
  for (std::size_t k = 0; k < 2000; ++k)
    x = rcmap::mod1(rcmap::eval_tau(p, x) + uniform(gen, -eps, eps));
  for (std::size_t k = 0; k < n_steps; ++k) {
    hist[static_cast<std::size_t>(x * static_cast<double>(n_bins))] += 1.0;
    x = rcmap::mod1(rcmap::eval_tau(p, x) + uniform(gen, -eps, eps));
  }
  // per-unit-length density, same normalization as DensityVector
  for (double& h : hist)
    h *= static_cast<double>(n_bins) / static_cast<double>(n_steps);
  return hist;
}

inline double l1_distance(const std::vector<double>& a,
                          const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
  return d / static_cast<double>(a.size());
}

// Kolmogorov-Smirnov distance to the uniform law on [0, 1).
inline double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double hi = static_cast<double>(i + 1) / n - xs[i];
    double lo = xs[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

}  // namespace oracle
