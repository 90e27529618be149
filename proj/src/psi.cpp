#include "rcmap/psi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "rcmap/detail/rootscan.hpp"
#include "rcmap/errors.hpp"

namespace rcmap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum over harmonics of w^d * (coefficient * phase), where differentiating
// d times maps (cos, sin) -> rotated pair with sign flips.
double trig_sum(const std::vector<double>& c, const std::vector<double>& s,
                double x, int d) {
  double acc = 0.0;
  for (std::size_t k = 1; k <= c.size(); ++k) {
    double ck = c[k - 1], sk = s[k - 1];
    if (ck == 0.0 && sk == 0.0) continue;
    double w = kTwoPi * static_cast<double>(k);
    double ang = w * x;
    double co = std::cos(ang), si = std::sin(ang);
    double term;
    switch (d & 3) {
      case 0: term = ck * co + sk * si; break;
      case 1: term = -ck * si + sk * co; break;
      case 2: term = -(ck * co + sk * si); break;
      default: term = ck * si - sk * co; break;
    }
    double scale = 1.0;
    for (int i = 0; i < d; ++i) scale *= w;
    acc += scale * term;
  }
  return acc;
}

}  // namespace

PsiSpec PsiSpec::make(std::vector<double> cos_coeffs,
                      std::vector<double> sin_coeffs, double root_tol) {
  if (root_tol <= 0.0 || root_tol > 1e-3)
    throw std::invalid_argument("root_tol out of range");
  PsiSpec p;
  std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
  cos_coeffs.resize(n, 0.0);
  sin_coeffs.resize(n, 0.0);
  p.cos_ = std::move(cos_coeffs);
  p.sin_ = std::move(sin_coeffs);
  p.n_harmonics_ = n;
  p.flat_ = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (p.cos_[k] != 0.0 || p.sin_[k] != 0.0) p.flat_ = false;
    if (!std::isfinite(p.cos_[k]) || !std::isfinite(p.sin_[k]))
      throw std::invalid_argument("non-finite coefficient");
  }

  for (std::size_t k = 1; k <= n; ++k) {
    double amp = std::fabs(p.cos_[k - 1]) + std::fabs(p.sin_[k - 1]);
    double w = kTwoPi * static_cast<double>(k);
    p.coef_d2_ += w * w * amp;
    p.coef_d3_ += w * w * w * amp;
  }

  if (!p.flat_) {
    std::size_t grid = std::max<std::size_t>(65536, 1024 * n);
    double h = 1.0 / static_cast<double>(grid);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
      double x = static_cast<double>(j) * h;
      m1 = std::max(m1, std::fabs(p.deriv(x)));
      m2 = std::max(m2, std::fabs(p.deriv2(x)));
    }
    p.sup_d1_ = m1 + 0.5 * h * p.coef_d2_;
    p.sup_d2_ = m2 + 0.5 * h * p.coef_d3_;
    p.critical_ = psi_critical_points(p, root_tol);
  }
  return p;
}

PsiSpec PsiSpec::default_profile() {
  return make({}, {1.0 / kTwoPi});
}

double PsiSpec::eval(double x) const { return trig_sum(cos_, sin_, x, 0); }
double PsiSpec::deriv(double x) const { return trig_sum(cos_, sin_, x, 1); }
double PsiSpec::deriv2(double x) const { return trig_sum(cos_, sin_, x, 2); }
double PsiSpec::deriv3(double x) const { return trig_sum(cos_, sin_, x, 3); }

std::pair<double, double> PsiSpec::value_and_slope(double x) const {
  double v = 0.0, d = 0.0;
  for (std::size_t k = 1; k <= n_harmonics_; ++k) {
    double ck = cos_[k - 1], sk = sin_[k - 1];
    if (ck == 0.0 && sk == 0.0) continue;
    double w = kTwoPi * static_cast<double>(k);
    double ang = w * x;
    double co = std::cos(ang), si = std::sin(ang);
    v += ck * co + sk * si;
    d += w * (sk * co - ck * si);
  }
  return {v, d};
}

std::vector<CriticalPoint> psi_critical_points(const PsiSpec& psi,
                                               double root_tol) {
  if (psi.flat()) return {};
  std::size_t points =
      std::max<std::size_t>(4096, 512 * psi.max_harmonic());
  auto d1 = [&psi](double x) { return psi.deriv(x); };
  std::vector<double> roots = detail::circle_roots(d1, points, root_tol);
  if (roots.empty())
    throw DegenerateCritical("no sign change of psi' found");

  double floor = psi.nondegeneracy_floor();
  std::vector<CriticalPoint> out;
  out.reserve(roots.size());
  for (double r : roots) {
    double c = psi.deriv2(r);
    if (std::fabs(c) < floor)
      throw DegenerateCritical("critical point at x=" + std::to_string(r) +
                               " has |psi''| below floor");
    out.push_back({r, c});
  }
  return out;
}

std::string PsiSpec::to_json() const {
  nlohmann::ordered_json j;
  j["cos"] = cos_;
  j["sin"] = sin_;
  return j.dump();
}

PsiSpec PsiSpec::from_json(const std::string& text, double root_tol) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bad psi json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("cos") || !j.contains("sin"))
    throw ConfigError("psi json must hold arrays 'cos' and 'sin'");
  std::vector<double> c = j["cos"].get<std::vector<double>>();
  std::vector<double> s = j["sin"].get<std::vector<double>>();
  return make(std::move(c), std::move(s), root_tol);
}

}  // namespace rcmap
