#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcmap/map.hpp"
#include "rcmap/transfer.hpp"

namespace rcmap {

enum class LyapMethod { monte_carlo, quadrature };

struct LyapunovEstimate {
  double value = 0.0;
  LyapMethod method = LyapMethod::monte_carlo;
  double std_error = 0.0;  // replica spread / sqrt(n_replicas); 0 for quadrature
  std::uint64_t n_steps = 0;
  std::uint64_t burn_in = 0;
  std::uint32_t n_replicas = 0;
  double a = 0.0, L = 0.0, eps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  // average of |psi'| along the same orbit / against the same density;
  // feeds the Jensen upper bound
  double mean_abs_slope = 0.0;
  std::vector<double> replica_values;
};

// Birkhoff average of log|tau'| along kicked orbits. Each replica owns
// substream stream_base + r, draws its uniform start from position 0, and
// accumulates after burn_in steps. |tau'| below 1e-300 contributes
// log(1e-300) so one machine-zero hit cannot poison the run.
LyapunovEstimate birkhoff_lyapunov(const MapParams& p, double eps,
                                   std::uint64_t seed, std::uint64_t n_steps,
                                   std::uint64_t burn_in,
                                   std::uint32_t n_replicas,
                                   std::uint64_t stream_base = 0,
                                   int workers = 1);

// integral of log|tau'| against a converged cell density. Cells touching
// {|tau'| <= 0.1} integrate in the variable t = |tau'| (monotone per piece
// between folds and inflection points), which absorbs the logarithmic
// singularity; all other cells use plain Gauss-Legendre.
LyapunovEstimate quadrature_lyapunov(const MapParams& p,
                                     const DensityVector& d);

// integral of log|tau'| over I_1 by the same substitution, one monotone half
// per side of each fold. Negative; magnitude is O(1/L).
double log_integral_I1(const MapParams& p);

struct JensenReport {
  double value = 0.0;
  double refined_rhs = 0.0;  // log(1 + L * mean|psi'|)
  double crude_rhs = 0.0;    // log(1 + L * sup|psi'|)
  bool pass_refined = false;
  bool pass_crude = false;
  bool pass = false;
};

JensenReport jensen_upper_check(const LyapunovEstimate& est,
                                const MapParams& p);

std::string estimate_csv_header();
std::string estimate_csv_row(const LyapunovEstimate& est);

}  // namespace rcmap
