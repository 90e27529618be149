#pragma once

#include <vector>

namespace rcmap {

// Gauss-Legendre rule on [0, 1]. Weights are normalized to sum to 1 exactly
// as stored, so integrating a constant is exact to the last bit.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; thread-safe. order in [1, 64].
const GaussRule& gauss_rule(int order);

template <class F>
double gl_integrate(F&& f, double a, double b, int order) {
  const GaussRule& g = gauss_rule(order);
  double w = b - a;
  double acc = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q)
    acc += g.weights[q] * f(a + w * g.nodes[q]);
  return acc * w;
}

// Integrate f over [a, b] where f blows up logarithmically at one endpoint:
// dyadic panels shrinking geometrically toward the singular end, each handled
// by the base rule. The untouched sliver next to the singularity has length
// (b - a) * 2^-panels.
template <class F>
double gl_log_endpoint(F&& f, double a, double b, bool singular_at_a,
                       int order = 16, int panels = 60) {
  double len = b - a;
  if (len <= 0.0) return 0.0;
  double acc = 0.0;
  double far = 1.0;  // panel boundary as fraction of len from the singular end
  for (int m = 0; m < panels; ++m) {
    double near = far * 0.5;
    double lo = singular_at_a ? a + near * len : b - far * len;
    double hi = singular_at_a ? a + far * len : b - near * len;
    acc += gl_integrate(f, lo, hi, order);
    far = near;
  }
  return acc;
}

}  // namespace rcmap
