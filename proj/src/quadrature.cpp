#include "rcmap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "rcmap/detail/kahan.hpp"

namespace rcmap {

namespace {

// Nodes via Newton iteration on P_n with the Chebyshev-angle initial guess.
GaussRule compute_rule(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    // map [-1, 1] -> [0, 1]; nodes come out descending in x
    g.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    g.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  detail::Kahan total;
  for (double w : g.weights) total.add(w);
  double norm = total.value();
  for (double& w : g.weights) w /= norm;
  return g;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 1 || order > 64)
    throw std::invalid_argument("quadrature order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

}  // namespace rcmap
