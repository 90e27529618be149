#pragma once

#include <cstddef>
#include <string>

#include "rcmap/arcset.hpp"
#include "rcmap/psi.hpp"

namespace rcmap {

struct ParameterWindow {
  double L = 0.0;
  double eps0 = 0.0;
  double K1 = 0.0, K2 = 0.0;
  ArcSet A;  // admissible rotation parameters
  std::size_t component_count = 0;
};

struct ScheduleSpec {
  double L = 0.0;
  double eps0 = 0.0;  // L^{-1/2}
  double K1 = 0.0;    // (L / log L)^{1/2}
  double K2 = 0.0;    // L^{1/2} / log L
};

// {a : B_eps(I_{K2}) and tau_a(I_{K1}) disjoint}. Since tau_a(I_{K1}) is
// tau_0(I_{K1}) shifted by a, the excluded parameters form an exact Minkowski
// difference: one arc [v.lo - u.hi, v.hi - u.lo] per (image arc u, fattened
// arc v) pair; A is the complement.
ParameterWindow compute_A_set(const PsiSpec& psi, double L, double eps,
                              double K1, double K2);

struct AtlasMeasureReport {
  double measure = 0.0;
  double deficit_K1 = 0.0;  // K1^2 / L
  double deficit_K2 = 0.0;  // K2 / L
  double deficit_eps = 0.0; // 2 * eps0
  double c_hat = 0.0;       // fitted constant: 1 - m(A) <= c_hat * (K1^2/L + K2/L) + 2 eps0
};

AtlasMeasureReport measure_report(const ParameterWindow& w);

struct ErgodicityThresholds {
  double eps_general = 0.0;  // m(I_{N+1}) / 2, valid for every L
  double eps_large_L = 0.0;  // b_2(L) / 2, valid for large L
};

ErgodicityThresholds ergodicity_thresholds(const PsiSpec& psi, double L);

// eps0 = L^{-1/2}, K1 = (L/log L)^{1/2}, K2 = L^{1/2}/log L; supported for
// L in [1e2, 1e8] (below 1e2, K2 drops under the K >= 1 floor).
ScheduleSpec default_schedule(double L);

std::string window_to_json(const ParameterWindow& w);

}  // namespace rcmap
