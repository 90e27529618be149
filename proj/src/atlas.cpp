#include "rcmap/atlas.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rcmap/errors.hpp"
#include "rcmap/map.hpp"

namespace rcmap {

ParameterWindow compute_A_set(const PsiSpec& psi, double L, double eps,
                              double K1, double K2) {
  if (!(K1 >= 1.0 && K2 >= 1.0))
    throw std::invalid_argument("K1, K2 must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");

  MapParams p0 = make_params(0.0, L, psi);
  ArcSet IK1 = compute_I_K(p0, K1);
  ArcSet IK2 = compute_I_K(p0, K2);

  ParameterWindow w;
  w.L = L;
  w.eps0 = eps;
  w.K1 = K1;
  w.K2 = K2;

  if (IK1.empty() || IK2.empty()) {
    w.A = ArcSet::full();
    w.component_count = 1;
    return w;
  }

  ArcSet U = image_arcset(p0, IK1, 0.0);
  ArcSet V = IK2.dilate(eps);
  ArcSet excluded;
  if (U.is_full() || V.is_full()) {
    excluded = ArcSet::full();
  } else {
    std::vector<Arc> raw;
    raw.reserve(U.size() * V.size());
    for (const Arc& u : U.arcs())
      for (const Arc& v : V.arcs())
        raw.push_back({v.lo - u.hi, v.hi - u.lo});
    excluded = ArcSet::from_arcs(std::move(raw));
  }

  w.A = excluded.complement();
  if (w.A.empty())
    throw EmptyAtlas("no admissible a at L = " + std::to_string(L) +
                     " for K1 = " + std::to_string(K1) +
                     ", K2 = " + std::to_string(K2));
  w.component_count = w.A.size();
  return w;
}

AtlasMeasureReport measure_report(const ParameterWindow& w) {
  AtlasMeasureReport r;
  r.measure = w.A.measure();
  r.deficit_K1 = w.K1 * w.K1 / w.L;
  r.deficit_K2 = w.K2 / w.L;
  r.deficit_eps = 2.0 * w.eps0;
  double structural = r.deficit_K1 + r.deficit_K2;
  double short_of_full = 1.0 - r.measure - r.deficit_eps;
  r.c_hat = (short_of_full > 0.0 && structural > 0.0)
                ? short_of_full / structural
                : 0.0;
  return r;
}

ErgodicityThresholds ergodicity_thresholds(const PsiSpec& psi, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be > 0");
  MapParams p0 = make_params(0.0, L, psi);
  double Np1 = static_cast<double>(psi.num_critical()) + 1.0;
  ErgodicityThresholds t;
  t.eps_general = compute_I_K(p0, Np1).measure() / 2.0;
  t.eps_large_L = largest_component_length(compute_I_K(p0, 2.0)) / 2.0;
  return t;
}

ScheduleSpec default_schedule(double L) {
  if (!(L >= 1e2 && L <= 1e8))
    throw std::invalid_argument("schedule supports L in [1e2, 1e8]");
  ScheduleSpec s;
  s.L = L;
  s.eps0 = 1.0 / std::sqrt(L);
  s.K1 = std::sqrt(L / std::log(L));
  s.K2 = std::sqrt(L) / std::log(L);
  return s;
}

std::string window_to_json(const ParameterWindow& w) {
  nlohmann::ordered_json j;
  j["L"] = w.L;
  j["eps0"] = w.eps0;
  j["K1"] = w.K1;
  j["K2"] = w.K2;
  j["arcs"] = nlohmann::json::parse(w.A.to_json());
  j["measure"] = w.A.measure();
  j["component_count"] = w.component_count;
  return j.dump(2);
}

}  // namespace rcmap
