#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcmap/errors.hpp"
#include "rcmap/lyapunov.hpp"
#include "rcmap/sink.hpp"

using namespace rcmap;

namespace {
DensityVector uniform_density(std::size_t n) {
  DensityVector d;
  d.rho.assign(n, 1.0);
  d.converged = true;
  return d;
}
}  // namespace

TEST_CASE("rotations have exponent exactly zero") {
  auto rot = make_params(0.3, 0.0, PsiSpec::default_profile());
  auto mc = birkhoff_lyapunov(rot, 0.2, 1, 10000, 100, 4);
  CHECK(mc.value == 0.0);
  CHECK(mc.std_error == 0.0);
  auto quad = quadrature_lyapunov(rot, uniform_density(128));
  CHECK(quad.value == 0.0);
  CHECK(quad.std_error == 0.0);
}

TEST_CASE("complete smearing reproduces log 5 both ways") {
  // eps = 1/2 resets to Lebesgue every step, so lambda = integral of
  // log|1 + 10 cos(2 pi x)| dx = log(10/2)
  const double log5 = std::log(5.0);
  auto p = make_params(0.3, 10.0, PsiSpec::default_profile());

  auto mc = birkhoff_lyapunov(p, 0.5, 2025, 200000, 2000, 8);
  CHECK(mc.std_error > 0.0);
  CHECK(mc.std_error < 0.01);
  CHECK(std::fabs(mc.value - log5) <= 3.0 * mc.std_error);

  // replica bookkeeping is self-consistent
  REQUIRE(mc.replica_values.size() == 8);
  double mean = 0.0;
  for (double v : mc.replica_values) mean += v;
  mean /= 8.0;
  CHECK(mc.value == doctest::Approx(mean).epsilon(1e-12));
  double ss = 0.0;
  for (double v : mc.replica_values) ss += (v - mean) * (v - mean);
  CHECK(mc.std_error ==
        doctest::Approx(std::sqrt(ss / 7.0) / std::sqrt(8.0)).epsilon(1e-12));

  auto quad = quadrature_lyapunov(p, uniform_density(512));
  CHECK(std::fabs(quad.value - log5) < 1e-9);
  CHECK(quad.mean_abs_slope ==
        doctest::Approx(2.0 / std::acos(-1.0)).epsilon(1e-10));
}

TEST_CASE("quadrature handles a slope crossing zero inside the slow band") {
  // closed form: integral of log|1 + c cos t| over a period is
  // log((1 + sqrt(1 - c^2)) / 2) for c < 1
  auto p = make_params(0.3, 0.5, PsiSpec::default_profile());
  auto quad = quadrature_lyapunov(p, uniform_density(512));
  CHECK(std::fabs(quad.value - (-0.06933646419507391)) < 1e-12);
}

TEST_CASE("Jensen upper bound") {
  auto p = make_params(0.3, 10.0, PsiSpec::default_profile());
  auto est = birkhoff_lyapunov(p, 0.5, 7, 50000, 1000, 4);
  auto jr = jensen_upper_check(est, p);
  CHECK(jr.pass);
  CHECK(jr.pass_refined);
  CHECK(jr.pass_crude);
  CHECK(jr.value == est.value);
  CHECK(jr.refined_rhs ==
        doctest::Approx(std::log1p(10.0 * est.mean_abs_slope)).epsilon(1e-12));
  CHECK(jr.refined_rhs < jr.crude_rhs);
  // crude side uses the safe sup bound, so it sits at or a hair above log 11
  CHECK(jr.crude_rhs >= std::log(11.0) - 1e-12);
  CHECK(jr.crude_rhs <= std::log(11.0) + 1e-3);
}

TEST_CASE("burn-in must be a small fraction of the run") {
  auto p = make_params(0.3, 10.0, PsiSpec::default_profile());
  CHECK_THROWS_AS(birkhoff_lyapunov(p, 0.5, 1, 500, 100, 2),
                  std::invalid_argument);
}

TEST_CASE("log integral over the slow set") {
  PsiSpec psi = PsiSpec::default_profile();
  double v100 = log_integral_I1(make_params(0.0, 100.0, psi));
  CHECK(std::fabs(v100 - (-0.006366551442077335)) < 1e-10);

  // magnitude scales like (2 N / (2 pi)) / L = (2 / pi) / L
  double v1k = log_integral_I1(make_params(0.0, 1000.0, psi));
  CHECK(-v1k * 1000.0 > 0.636);
  CHECK(-v1k * 1000.0 < 0.637);

  // at L = 2 the two bands around the criticals have glued into one
  CHECK_THROWS_AS(log_integral_I1(make_params(0.0, 2.0, psi)), ComponentMerge);
}

TEST_CASE("csv row matches header shape") {
  auto est = birkhoff_lyapunov(make_params(0.1, 0.0, PsiSpec::default_profile()),
                               0.3, 5, 5000, 100, 2);
  auto header = estimate_csv_header();
  auto row = estimate_csv_row(est);
  CHECK(!header.empty());
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
}

TEST_CASE("sink certificate at L = 1000") {
  PsiSpec psi = PsiSpec::default_profile();
  auto cert = construct_sink(psi, 1000.0, 0);

  // fold and its fixing parameter, against closed-form roots of
  // 1 + 1000 cos(2 pi z) = 0
  CHECK(std::fabs(cert.z - 0.25015915496961773) < 1e-10);
  CHECK(std::fabs(cert.a_z - 0.84513648559610456) < 1e-10);

  // nu = 1/(2 M L) with M a safe bound for sup|psi''| = 2 pi
  const double nu0 = 7.9577471545947668e-5;  // 1 / (4 pi L)
  CHECK(cert.nu <= nu0);
  CHECK(cert.nu >= 0.9999 * nu0);
  CHECK(cert.eps == cert.nu / 3.0);
  CHECK(cert.M >= 2.0 * std::acos(-1.0) - 1e-12);
  CHECK(cert.L == 1000.0);

  // trapping margin: eps + nu/3 + (L M / 2) nu^2 = (11/12) nu by design
  double lhs = cert.eps + cert.nu / 3.0 +
               0.5 * cert.L * cert.M * cert.nu * cert.nu;
  CHECK(lhs / cert.nu == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
  CHECK(cert.contraction <= 0.5);
  CHECK(cert.contraction > 0.0);

  // the certificate serializes with its profile
  auto js = cert.to_json();
  CHECK(js.find("\"nu\"") != std::string::npos);
}

TEST_CASE("sink orbits stay trapped and contract") {
  auto cert = construct_sink(PsiSpec::default_profile(), 1000.0, 0);
  const double log2 = std::log(2.0);
  for (double da : {-cert.nu / 3.0, 0.0, cert.nu / 3.0}) {
    auto est = verify_sink(cert, cert.a_z + da, 31, 100000);
    CHECK(est.value <= -log2);
    CHECK(est.n_steps == 100000);
  }
}

TEST_CASE("sink verification rejects bad parameters and catches escape") {
  auto cert = construct_sink(PsiSpec::default_profile(), 1000.0, 0);
  // a outside the certified window a_z +- nu/3
  CHECK_THROWS_AS(verify_sink(cert, cert.a_z + cert.nu, 1, 1000),
                  std::invalid_argument);

  // widening the kick window beyond what the margin supports must be caught
  // by the orbit monitor, not silently averaged over
  SinkCertificate wide = cert;
  wide.eps = 0.8 * cert.nu;
  CHECK_THROWS_AS(verify_sink(wide, cert.a_z + cert.nu / 3.0, 1, 100000),
                  TrapEscape);
}
