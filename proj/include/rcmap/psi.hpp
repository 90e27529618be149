#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rcmap {

struct CriticalPoint {
  double location;     // in [0, 1)
  double curvature;    // psi'' there, bounded away from 0
};

// Forcing profile: a finite trigonometric polynomial
//
//   psi(x) = sum_k ( cos_k * cos(2 pi k x) + sin_k * sin(2 pi k x) ),  k >= 1.
//
// Immutable after construction. Critical points (roots of psi') are located
// once by a scan and kept with their curvatures; an all-zero coefficient
// vector is allowed as the flat profile and has none. Derivative sup bounds
// are safe upper estimates: a dense grid maximum inflated by the coefficient
// Lipschitz bound of the next derivative.
class PsiSpec {
 public:
  static PsiSpec make(std::vector<double> cos_coeffs,
                      std::vector<double> sin_coeffs, double root_tol = 1e-12);

  // Default profile sin(2 pi x) / (2 pi): two critical points, slopes in
  // [-1, 1], curvature peaks 2 pi.
  static PsiSpec default_profile();

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  double deriv3(double x) const;

  // psi(x) and psi'(x) with one sin/cos pair per call; the hot path.
  std::pair<double, double> value_and_slope(double x) const;

  const std::vector<CriticalPoint>& critical_points() const { return critical_; }
  std::size_t num_critical() const { return critical_.size(); }
  bool flat() const { return flat_; }

  double sup_abs_deriv() const { return sup_d1_; }
  double sup_abs_deriv2() const { return sup_d2_; }
  // Coefficient bound on sup |psi'''|; Lipschitz constant of psi''.
  double deriv2_lipschitz() const { return coef_d3_; }
  double nondegeneracy_floor() const { return 1e-6 * sup_d2_; }

  std::size_t max_harmonic() const { return n_harmonics_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }

  std::string to_json() const;
  static PsiSpec from_json(const std::string& text, double root_tol = 1e-12);

 private:
  PsiSpec() = default;

  std::vector<double> cos_, sin_;
  std::size_t n_harmonics_ = 0;
  bool flat_ = true;
  std::vector<CriticalPoint> critical_;
  double sup_d1_ = 0.0, sup_d2_ = 0.0;
  double coef_d2_ = 0.0, coef_d3_ = 0.0;
};

// Re-run critical point extraction at a given tolerance. Flat profiles give
// an empty list; a root of psi' with |psi''| under the nondegeneracy floor
// raises DegenerateCritical.
std::vector<CriticalPoint> psi_critical_points(const PsiSpec& psi,
                                               double root_tol);

}  // namespace rcmap
