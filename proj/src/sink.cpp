#include "rcmap/sink.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rcmap/arcset.hpp"
#include "rcmap/circle.hpp"
#include "rcmap/detail/logfloor.hpp"
#include "rcmap/errors.hpp"
#include "rcmap/io.hpp"
#include "rcmap/map.hpp"
#include "rcmap/noise.hpp"

namespace rcmap {

std::string SinkCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["z"] = z;
  j["a_z"] = a_z;
  j["nu"] = nu;
  j["eps"] = eps;
  j["M"] = M;
  j["contraction"] = contraction;
  j["L"] = L;
  j["psi"] = nlohmann::json::parse(psi.to_json());
  return j.dump(2);
}

SinkCertificate construct_sink(const PsiSpec& psi, double L,
                               std::size_t fold_index) {
  MapParams p0 = make_params(0.0, L, psi);
  std::vector<double> folds = tau_critical_points(p0);
  if (folds.empty())
    throw std::invalid_argument("map has no folds at this L");
  if (fold_index >= folds.size())
    throw std::invalid_argument("fold_index out of range");

  SinkCertificate cert;
  cert.L = L;
  cert.psi = psi;
  cert.z = folds[fold_index];
  cert.a_z = mod1(-L * psi.eval(cert.z));
  cert.M = psi.sup_abs_deriv2();
  cert.nu = 1.0 / (2.0 * cert.M * L);
  cert.eps = cert.nu / 3.0;

  // (i) trapping inequality; analytic margin 11/12
  double lhs = cert.eps + cert.nu / 3.0 + 0.5 * L * cert.M * cert.nu * cert.nu;
  if (!(lhs <= cert.nu))
    throw TrapViolation("trapping inequality fails: lhs = " +
                        fmt_double(lhs) + " vs nu = " + fmt_double(cert.nu));

  // (ii) contraction on the ball: |tau'(x)| <= L |x - z| sup|psi''| locally;
  // bound sup|psi''| over the ball by grid max plus Lipschitz inflation
  std::size_t grid = std::max<std::size_t>(
      4096, static_cast<std::size_t>(std::ceil(L)));
  double h = 2.0 * cert.nu / static_cast<double>(grid);
  double local = 0.0;
  for (std::size_t g = 0; g <= grid; ++g) {
    double x = cert.z - cert.nu + h * static_cast<double>(g);
    local = std::max(local, std::fabs(psi.deriv2(x)));
  }
  double local_bound = local + 0.5 * h * psi.deriv2_lipschitz();
  cert.contraction = L * cert.nu * local_bound;
  if (!(cert.contraction <= 0.5))
    throw TrapViolation("contraction bound " + fmt_double(cert.contraction) +
                        " exceeds 1/2");

  // trapping check through interval images at the three extreme parameters
  ArcSet ball = ArcSet::arc(cert.z - cert.nu, cert.z + cert.nu);
  ArcSet outside = ball.complement();
  for (double da : {-cert.nu / 3.0, 0.0, cert.nu / 3.0}) {
    MapParams pa = make_params(mod1(cert.a_z + da), L, psi);
    ArcSet img = image_arcset(pa, ball, cert.eps, folds);
    if (!ArcSet::intersect(img, outside).empty())
      throw TrapViolation("fattened image leaves the trapping ball at a = " +
                          fmt_double(pa.a));
  }
  return cert;
}

LyapunovEstimate verify_sink(const SinkCertificate& cert, double a,
                             std::uint64_t seed, std::uint64_t n_steps) {
  if (circ_dist(a, cert.a_z) > cert.nu / 3.0 + 1e-15)
    throw std::invalid_argument("a outside the certified window");
  MapParams p = make_params(mod1(a), cert.L, cert.psi);
  KickStream ks({cert.eps, seed}, 0);

  double x = cert.z;
  double sum_log = 0.0, sum_abs = 0.0;
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    if (circ_dist(x, cert.z) > cert.nu + 1e-12)
      throw TrapEscape("orbit left the ball at step " + std::to_string(k));
    auto [v, s] = p.psi.value_and_slope(x);
    sum_log += detail::floored_log_abs(1.0 + p.L * s);
    sum_abs += std::fabs(s);
    x = mod1(p.a + x + p.L * v + ks.next_kick());
  }

  LyapunovEstimate est;
  est.method = LyapMethod::monte_carlo;
  est.value = sum_log / static_cast<double>(n_steps);
  est.mean_abs_slope = sum_abs / static_cast<double>(n_steps);
  est.n_steps = n_steps;
  est.n_replicas = 1;
  est.a = p.a;
  est.L = p.L;
  est.eps = cert.eps;
  est.seed = seed;
  est.replica_values = {est.value};
  return est;
}

}  // namespace rcmap
