#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcmap/atlas.hpp"
#include "rcmap/circle.hpp"
#include "rcmap/errors.hpp"
#include "rcmap/map.hpp"

using namespace rcmap;

namespace {

// circle distance from a point to a closed arc union
double dist_to(const ArcSet& S, double y) {
  if (S.contains(y)) return 0.0;
  double best = 1.0;
  for (const auto& arc : S.arcs()) {
    best = std::min(best, circ_dist(y, mod1(arc.lo)));
    best = std::min(best, circ_dist(y, mod1(arc.hi)));
  }
  return best;
}

// min over a grid on I_{K1} of dist(tau_a(x), V); grid pitch is returned so
// callers can budget the miss
double grid_clearance(const PsiSpec& psi, double L, double a, const ArcSet& U,
                      const ArcSet& V, double* pitch) {
  const int G = 2000;
  double mind = 1.0;
  *pitch = 0.0;
  for (const auto& arc : U.arcs()) {
    double h = arc.length() / G;
    *pitch = std::max(*pitch, h);
    for (int k = 0; k <= G; ++k) {
      double x = arc.lo + h * k;
      mind = std::min(mind, dist_to(V, mod1(a + x + L * psi.eval(x))));
    }
  }
  return mind;
}

}  // namespace

TEST_CASE("default schedule values and domain") {
  auto s = default_schedule(1e4);
  CHECK(s.L == 1e4);
  CHECK(s.eps0 == 0.01);  // 1/sqrt(1e4) is exact
  CHECK(s.K1 == doctest::Approx(32.950511449113041).epsilon(1e-12));
  CHECK(s.K2 == doctest::Approx(10.857362047581296).epsilon(1e-12));
  CHECK_THROWS_AS(default_schedule(50.0), std::invalid_argument);
  CHECK_THROWS_AS(default_schedule(1e9), std::invalid_argument);
}

TEST_CASE("admissible set grows along the schedule") {
  PsiSpec psi = PsiSpec::default_profile();
  double prev = -1.0;
  for (double L : {1e3, 1e4, 1e5}) {
    auto s = default_schedule(L);
    auto w = compute_A_set(psi, L, s.eps0, s.K1, s.K2);
    CHECK(!w.A.empty());
    CHECK(w.component_count <= 4);
    CHECK(w.A.measure() > prev);
    prev = w.A.measure();

    auto rep = measure_report(w);
    CHECK(rep.measure == w.A.measure());
    CHECK(rep.deficit_K1 == doctest::Approx(s.K1 * s.K1 / L).epsilon(1e-15));
    CHECK(rep.deficit_K2 == doctest::Approx(s.K2 / L).epsilon(1e-15));
    CHECK(rep.deficit_eps == doctest::Approx(2.0 * s.eps0).epsilon(1e-15));
    // c_hat solves 1 - m = c_hat (K1^2 + K2)/L + 2 eps0 when the slack is
    // positive
    double slack = 1.0 - rep.measure - rep.deficit_eps;
    CHECK(rep.c_hat * (rep.deficit_K1 + rep.deficit_K2) ==
          doctest::Approx(std::max(0.0, slack)).epsilon(1e-12));
  }
}

TEST_CASE("regression pin on the L = 1e4 window") {
  PsiSpec psi = PsiSpec::default_profile();
  auto s = default_schedule(1e4);
  auto w = compute_A_set(psi, 1e4, s.eps0, s.K1, s.K2);
  CHECK(w.A.measure() == doctest::Approx(0.8840574391141853).epsilon(1e-9));
  CHECK(w.component_count == 4);
  CHECK(window_to_json(w).find("\"K1\"") != std::string::npos);
}

TEST_CASE("membership agrees with a direct image/target separation check") {
  // independent of the Minkowski construction: sample a in A and verify the
  // shifted image of I_{K1} stays clear of the fattened I_{K2}; sample a in
  // the complement and verify it does not
  PsiSpec psi = PsiSpec::default_profile();
  const double L = 1e4;
  auto s = default_schedule(L);
  auto w = compute_A_set(psi, L, s.eps0, s.K1, s.K2);
  auto p0 = make_params(0.0, L, psi);
  auto U = compute_I_K(p0, s.K1);
  auto V = compute_I_K(p0, s.K2).dilate(s.eps0);

  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double a = w.A.point_at_fraction(t);
    double pitch = 0.0;
    double clear = grid_clearance(psi, L, a, U, V, &pitch);
    // |tau'| <= K1 on I_{K1}, so the grid can miss by at most K1 * pitch
    CHECK(clear > s.K1 * pitch);
  }
  auto C = w.A.complement();
  for (double t : {0.1, 0.5, 0.9}) {
    double a = C.point_at_fraction(t);
    double pitch = 0.0;
    double clear = grid_clearance(psi, L, a, U, V, &pitch);
    CHECK(clear <= s.K1 * pitch + 1e-9);
  }
}

TEST_CASE("ergodicity thresholds at L = 100") {
  auto th = ergodicity_thresholds(PsiSpec::default_profile(), 100.0);
  // m(I_3)/2 and b_2/2 against closed-form arccos endpoints
  CHECK(std::fabs(th.eps_general - 0.009551207706512443) < 1e-10);
  CHECK(std::fabs(th.eps_large_L - 0.0031834703690763385) < 1e-10);
}

TEST_CASE("an over-greedy window empties the atlas") {
  CHECK_THROWS_AS(compute_A_set(PsiSpec::default_profile(), 100.0, 0.3, 99.0, 99.0),
                  EmptyAtlas);
}
