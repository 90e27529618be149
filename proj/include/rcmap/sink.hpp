#pragma once

#include <cstdint>
#include <string>

#include "rcmap/lyapunov.hpp"
#include "rcmap/psi.hpp"

namespace rcmap {

struct SinkCertificate {
  double z = 0.0;            // fold of tau
  double a_z = 0.0;          // parameter fixing the fold: tau_{a_z}(z) = z
  double nu = 0.0;           // trap radius 1/(2 M L)
  double eps = 0.0;          // kick half-width nu/3
  double M = 0.0;            // upper bound for sup|psi''|
  double contraction = 0.0;  // bound for sup over B_nu(z) of |tau'|
  double L = 0.0;
  PsiSpec psi = PsiSpec::default_profile();

  std::string to_json() const;
};

// Builds the trapping certificate at the given fold and verifies both
// inequalities: the trapping margin (= 11/12 analytically) and the
// contraction bound <= 1/2, the latter by grid evaluation with a Lipschitz
// inflation so the bound is safe. Also checks that the eps-fattened image of
// B_nu(z) stays inside B_nu(z) at a = a_z and both extremes a_z +- nu/3.
SinkCertificate construct_sink(const PsiSpec& psi, double L,
                               std::size_t fold_index);

// Runs the kicked orbit from z under the certificate, insisting it never
// leaves B_nu(z); returns the Birkhoff estimate over the whole orbit.
LyapunovEstimate verify_sink(const SinkCertificate& cert, double a,
                             std::uint64_t seed, std::uint64_t n_steps);

}  // namespace rcmap
