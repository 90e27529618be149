#include "rcmap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcmap/arcset.hpp"
#include "rcmap/circle.hpp"
#include "rcmap/detail/kahan.hpp"
#include "rcmap/detail/logfloor.hpp"
#include "rcmap/detail/rootscan.hpp"
#include "rcmap/errors.hpp"
#include "rcmap/io.hpp"
#include "rcmap/noise.hpp"
#include "rcmap/parallel.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap {

namespace {

using detail::floored_log_abs;

struct ReplicaResult {
  double mean_log = 0.0;
  double mean_abs = 0.0;
};

ReplicaResult run_replica(const MapParams& p, double eps, std::uint64_t seed,
                          std::uint64_t stream_id, std::uint64_t n_steps,
                          std::uint64_t burn_in) {
  KickStream ks({eps, seed}, stream_id);
  double x = ks.next_unit();
  const double a = p.a, L = p.L;
  for (std::uint64_t k = 0; k < burn_in; ++k) {
    auto [v, s] = p.psi.value_and_slope(x);
    (void)s;
    x = mod1(a + x + L * v + ks.next_kick());
  }
  double sum_log = 0.0, sum_abs = 0.0;
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    auto [v, s] = p.psi.value_and_slope(x);
    sum_log += floored_log_abs(1.0 + L * s);
    sum_abs += std::fabs(s);
    x = mod1(a + x + L * v + ks.next_kick());
  }
  double n = static_cast<double>(n_steps);
  return {sum_log / n, sum_abs / n};
}

}  // namespace

LyapunovEstimate birkhoff_lyapunov(const MapParams& p, double eps,
                                   std::uint64_t seed, std::uint64_t n_steps,
                                   std::uint64_t burn_in,
                                   std::uint32_t n_replicas,
                                   std::uint64_t stream_base, int workers) {
  if (n_replicas < 1) throw std::invalid_argument("need >= 1 replica");
  if (n_steps < 10 * burn_in)
    throw std::invalid_argument("n_steps must be >= 10 * burn_in");
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("eps must lie in [0, 1/2]");

  std::vector<ReplicaResult> res(n_replicas);
  parallel_for(n_replicas, workers, [&](std::size_t r) {
    res[r] = run_replica(p, eps, seed, stream_base + r, n_steps, burn_in);
  });

  LyapunovEstimate est;
  est.method = LyapMethod::monte_carlo;
  est.n_steps = n_steps;
  est.burn_in = burn_in;
  est.n_replicas = n_replicas;
  est.a = p.a;
  est.L = p.L;
  est.eps = eps;
  est.seed = seed;
  est.stream_base = stream_base;
  est.replica_values.reserve(n_replicas);

  double mean = 0.0, mean_abs = 0.0;
  for (const ReplicaResult& r : res) {
    est.replica_values.push_back(r.mean_log);
    mean += r.mean_log;
    mean_abs += r.mean_abs;
  }
  mean /= n_replicas;
  mean_abs /= n_replicas;
  est.value = mean;
  est.mean_abs_slope = mean_abs;
  if (n_replicas >= 2) {
    double ss = 0.0;
    for (const ReplicaResult& r : res) {
      double d = r.mean_log - mean;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / (n_replicas - 1)) /
                    std::sqrt(static_cast<double>(n_replicas));
  }
  return est;
}

namespace {

// integral of log|tau'| over [s, t] where tau' keeps one sign and |tau'| is
// monotone (no folds or inflections inside): substitute u = |tau'(x)|, so
// dx = du / |tau''(x(u))| and the log singularity sits at the u = 0 end.
double log_integral_monotone(const MapParams& p, double s, double t) {
  double Ts = std::fabs(eval_tau_prime(p, s));
  double Tt = std::fabs(eval_tau_prime(p, t));
  double Tlo = std::min(Ts, Tt), Thi = std::max(Ts, Tt);
  if (Thi - Tlo < 1e-15 * std::max(1.0, Thi)) {
    // |tau'| essentially constant on the piece
    return (t - s) * floored_log_abs(0.5 * (Ts + Tt));
  }
  auto x_of_u = [&](double u) {
    // |tau'| is monotone on [s, t]; bracket and bisect
    auto g = [&](double x) { return std::fabs(eval_tau_prime(p, x)) - u; };
    double gs = Ts - u, gt = Tt - u;
    return detail::bisect(g, s, t, gs, gt, 1e-13);
  };
  auto integrand = [&](double u) {
    double x = x_of_u(u);
    double dd = std::fabs(p.L * p.psi.deriv2(x));
    if (dd < 1e-300) dd = 1e-300;
    return std::log(std::max(u, 1e-300)) / dd;
  };
  return gl_log_endpoint(integrand, Tlo, Thi, /*singular_at_a=*/true, 16, 54);
}

}  // namespace

LyapunovEstimate quadrature_lyapunov(const MapParams& p,
                                     const DensityVector& d) {
  std::size_t n = d.rho.size();
  if (n < 2) throw std::invalid_argument("density grid too small");

  std::vector<double> folds =
      (p.L > 0.0 && !p.psi.flat()) ? tau_critical_points(p)
                                   : std::vector<double>{};
  std::vector<double> inflections;
  if (!p.psi.flat()) {
    auto d2 = [&](double x) { return p.psi.deriv2(x); };
    inflections = detail::circle_roots(
        d2, std::max<std::size_t>(4096, 512 * p.psi.max_harmonic()), 1e-12);
  }
  ArcSet slow = p.psi.flat() || p.L == 0.0
                    ? ArcSet{}
                    : detail_map::sublevel_set(p, 0.1, {});

  // kinks of |psi'| for the mean-slope integral
  const std::vector<CriticalPoint>& crit = p.psi.critical_points();

  detail::Kahan lambda_acc, abs_acc;
  for (std::size_t j = 0; j < n; ++j) {
    double lo = static_cast<double>(j) / n;
    double hi = static_cast<double>(j + 1) / n;
    ArcSet cell = ArcSet::arc(lo, hi);

    double cell_log;
    bool singular =
        !slow.empty() && !ArcSet::intersect(slow, cell).empty();
    if (singular) {
      std::vector<double> cuts{lo, hi};
      for (double f : folds)
        if (f > lo + 1e-13 && f < hi - 1e-13) cuts.push_back(f);
      for (double f : inflections)
        if (f > lo + 1e-13 && f < hi - 1e-13) cuts.push_back(f);
      std::sort(cuts.begin(), cuts.end());
      double acc = 0.0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
        acc += log_integral_monotone(p, cuts[c], cuts[c + 1]);
      cell_log = acc;
    } else {
      auto f = [&](double x) {
        return floored_log_abs(eval_tau_prime(p, x));
      };
      cell_log = gl_integrate(f, lo, hi, 16);
    }
    lambda_acc.add(d.rho[j] * cell_log);

    std::vector<double> cuts{lo, hi};
    for (const CriticalPoint& c : crit)
      if (c.location > lo + 1e-13 && c.location < hi - 1e-13)
        cuts.push_back(c.location);
    std::sort(cuts.begin(), cuts.end());
    double abs_int = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      abs_int += gl_integrate(
          [&](double x) { return std::fabs(p.psi.deriv(x)); }, cuts[c],
          cuts[c + 1], 8);
    abs_acc.add(d.rho[j] * abs_int);
  }

  LyapunovEstimate est;
  est.method = LyapMethod::quadrature;
  est.value = lambda_acc.value();
  est.mean_abs_slope = abs_acc.value();
  est.a = p.a;
  est.L = p.L;
  return est;
}

double log_integral_I1(const MapParams& p) {
  if (p.L <= 0.0 || p.psi.flat())
    throw std::invalid_argument("I_1 integral needs L > 0 and curved psi");
  ArcSet I1 = compute_I_K(p, 1.0);
  std::size_t N = p.psi.num_critical();
  if (I1.size() != N)
    throw ComponentMerge("I_1 has " + std::to_string(I1.size()) +
                         " components, expected " + std::to_string(N));
  std::vector<double> folds = tau_critical_points(p);

  double floor = p.psi.nondegeneracy_floor();
  double total = 0.0;
  for (const Arc& comp : I1.arcs()) {
    // exactly one fold inside, psi'' bounded away from 0 on the component
    std::vector<double> inside;
    for (double z : folds) {
      for (double cand : {z, z + 1.0})
        if (cand >= comp.lo - 1e-12 && cand <= comp.hi + 1e-12)
          inside.push_back(cand);
    }
    if (inside.size() != 1)
      throw ComponentMerge("component holds " +
                           std::to_string(inside.size()) +
                           " folds, expected 1");
    double z = inside.front();
    for (int g = 0; g <= 64; ++g) {
      double x = comp.lo + (comp.hi - comp.lo) * g / 64.0;
      if (std::fabs(p.psi.deriv2(x)) < floor)
        throw ComponentMerge("psi'' vanishes inside I_1");
    }
    total += log_integral_monotone(p, comp.lo, z);
    total += log_integral_monotone(p, z, comp.hi);
  }
  return total;
}

JensenReport jensen_upper_check(const LyapunovEstimate& est,
                                const MapParams& p) {
  JensenReport r;
  r.value = est.value;
  double collar = 3.0 * est.std_error + 1e-12;
  r.refined_rhs = std::log1p(p.L * est.mean_abs_slope);
  r.crude_rhs = std::log1p(p.L * p.psi.sup_abs_deriv());
  r.pass_refined = est.value <= r.refined_rhs + collar;
  r.pass_crude = est.value <= r.crude_rhs + collar;
  r.pass = r.pass_refined && r.pass_crude;
  return r;
}

std::string estimate_csv_header() {
  return "a,L,eps,method,value,std_error,n_steps,burn_in,n_replicas,seed\n";
}

std::string estimate_csv_row(const LyapunovEstimate& est) {
  return csv_line(
      {fmt_double(est.a), fmt_double(est.L), fmt_double(est.eps),
       est.method == LyapMethod::monte_carlo ? "monte_carlo" : "quadrature",
       fmt_double(est.value), fmt_double(est.std_error),
       std::to_string(est.n_steps), std::to_string(est.burn_in),
       std::to_string(est.n_replicas), std::to_string(est.seed)});
}

}  // namespace rcmap
