// Release gate: nine numbered checks over the assembled laboratory, one
// verdict line each. Every knob below is fixed so the binary is a pure
// function of the build.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rcmap/atlas.hpp"
#include "rcmap/circle.hpp"
#include "rcmap/io.hpp"
#include "rcmap/lyapunov.hpp"
#include "rcmap/map.hpp"
#include "rcmap/psi.hpp"
#include "rcmap/sink.hpp"
#include "rcmap/sweep.hpp"
#include "rcmap/transfer.hpp"

using namespace rcmap;
namespace fs = std::filesystem;

namespace {

struct CheckFail {
  std::string msg;
};

#define ACC_CHECK(cond, detail) \
  do {                          \
    if (!(cond)) throw CheckFail{std::string(detail)}; \
  } while (0)

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double loguniform(std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(gen));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const PsiSpec& profile() {
  static PsiSpec psi = PsiSpec::default_profile();
  return psi;
}

// 1. Complete smearing at eps = 1/2, L = 10: the kick re-draws the state
// from Lebesgue every step, so the density is uniform and lambda = log 5.
std::string criterion1() {
  const double log5 = std::log(5.0);
  auto p = make_params(0.3, 10.0, profile());

  auto P = build_ulam(p, 0.5, Grid{4096});
  auto d = stationary_density(P);
  ACC_CHECK(d.converged, "stationary iteration did not converge");
  double linf = 0.0;
  for (double r : d.rho) linf = std::max(linf, std::fabs(r - 1.0));
  ACC_CHECK(linf <= 1e-3, "density Linf gap " + num(linf) + " > 1e-3");

  auto quad = quadrature_lyapunov(p, d);
  ACC_CHECK(std::fabs(quad.value - log5) <= 1e-3,
            "lambda_quad off log 5 by " + num(quad.value - log5));

  auto mc = birkhoff_lyapunov(p, 0.5, 1, 1000000, 10000, 16);
  double dev = mc.value - log5;
  ACC_CHECK(std::fabs(dev) <= 3.0 * mc.std_error,
            "lambda_mc off log 5 by " + num(dev) + " vs 3se = " +
                num(3.0 * mc.std_error));
  return "Linf=" + num(linf) + ", quad dev=" + num(quad.value - log5) +
         ", mc dev/se=" + num(dev / mc.std_error);
}

// 2. Operator hygiene across random parameter draws.
std::string criterion2() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ua(0.0, 1.0), ue(0.05, 0.5);
  const std::size_t sizes[3] = {256, 512, 1024};
  double worst_row = 0.0, worst_frac = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    double a = ua(gen);
    double L = loguniform(gen, 0.5, 200.0);
    double eps = ue(gen);
    std::size_t n = sizes[gen() % 3];
    auto P = build_ulam(make_params(a, L, profile()), eps, Grid{n});
    for (std::size_t i = 0; i < n; ++i) {
      double gap = std::fabs(P.row_sum(i) - 1.0);
      worst_row = std::max(worst_row, gap);
      ACC_CHECK(gap <= 1e-12, "row sum off by " + num(gap) + " at trial " +
                                  std::to_string(trial));
    }
    auto d = stationary_density(P);
    ACC_CHECK(d.converged, "no convergence at trial " + std::to_string(trial));
    ACC_CHECK(d.residual <= 1e-10, "residual " + num(d.residual));
    for (double r : d.rho)
      ACC_CHECK(r >= 0.0, "negative density at trial " + std::to_string(trial));
    double bound =
        (1.0 + 2.0 / (static_cast<double>(n) * eps)) / (2.0 * eps);
    ACC_CHECK(d.sup() <= bound, "sup density " + num(d.sup()) + " > bound " +
                                    num(bound) + " at trial " +
                                    std::to_string(trial));
    worst_frac = std::max(worst_frac, d.sup() / bound);
  }
  return "12 draws, worst row gap=" + num(worst_row) +
         ", worst sup/bound=" + num(worst_frac);
}

// 3. The two estimators agree within noise plus discretization slack.
std::string criterion3() {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double L = loguniform(gen, 50.0, 400.0);
    double a = ua(gen);
    double eps = loguniform(gen, 0.02, 0.4);
    auto p = make_params(a, L, profile());
    double b2 = compute_I_K(p, 2.0).largest_component();
    ACC_CHECK(eps > b2 / 2.0, "draw below the ergodicity threshold");

    auto P = build_ulam(p, eps, Grid{2048});
    auto d = stationary_density(P);
    ACC_CHECK(d.converged, "no convergence at trial " + std::to_string(trial));
    auto quad = quadrature_lyapunov(p, d);
    auto mc = birkhoff_lyapunov(p, eps, 40000 + trial, 1000000, 10000, 16,
                                static_cast<std::uint64_t>(trial) << 20);
    double gap = std::fabs(mc.value - quad.value);
    double budget = 3.0 * mc.std_error + 0.01;
    ACC_CHECK(gap <= budget, "method gap " + num(gap) + " > " + num(budget) +
                                 " at (a=" + num(a) + ", L=" + num(L) +
                                 ", eps=" + num(eps) + ")");
    worst = std::max(worst, gap / budget);
  }
  return "20 draws, worst gap/budget=" + num(worst);
}

// 4. lambda tracks beta log L from below along eps = L^(beta-1), and every
// estimate respects the Jensen upper bound.
std::string criterion4() {
  std::string detail;
  for (double beta : {0.5, 1.0}) {
    std::vector<double> mins;
    for (double L : {1e2, 1e3, 1e4}) {
      double eps = std::min(0.5, std::pow(L, beta - 1.0));
      double mn = 1e300;
      for (int i = 0; i < 64; ++i) {
        double a = (i + 0.5) / 64.0;
        auto p = make_params(a, L, profile());
        auto est = birkhoff_lyapunov(p, eps, 1000 + i, 200000, 20000, 8,
                                     static_cast<std::uint64_t>(i) << 20);
        ACC_CHECK(jensen_upper_check(est, p).pass,
                  "Jensen bound violated at (a=" + num(a) + ", L=" + num(L) +
                      ", beta=" + num(beta) + ")");
        mn = std::min(mn, est.value / std::log(L));
      }
      if (!mins.empty())
        ACC_CHECK(mn >= mins.back(),
                  "min lambda/logL fell from " + num(mins.back()) + " to " +
                      num(mn) + " at L=" + num(L) + ", beta=" + num(beta));
      mins.push_back(mn);
    }
    ACC_CHECK(mins.back() >= beta - 0.2,
              "min lambda/logL " + num(mins.back()) + " < beta - 0.2 at L=1e4");
    if (!detail.empty()) detail += "; ";
    detail += "beta=" + num(beta) + " mins " + num(mins[0]) + "->" +
              num(mins[1]) + "->" + num(mins[2]);
  }
  return detail;
}

// 5. The trapping certificate at L = 1000 and million-step trapped orbits.
std::string criterion5() {
  auto cert = construct_sink(profile(), 1000.0, 0);
  double lhs =
      cert.eps + cert.nu / 3.0 + 0.5 * cert.L * cert.M * cert.nu * cert.nu;
  ACC_CHECK(std::fabs(lhs / cert.nu - 11.0 / 12.0) <= 1e-12,
            "trapping margin is " + num(lhs / cert.nu) + ", not 11/12");
  ACC_CHECK(cert.contraction <= 0.5,
            "contraction bound " + num(cert.contraction) + " > 1/2");

  double worst = -1e300;
  for (double da : {-cert.nu / 3.0, 0.0, cert.nu / 3.0}) {
    auto est = verify_sink(cert, cert.a_z + da, 777, 1000000);
    ACC_CHECK(est.value <= -std::log(2.0) + 0.02,
              "trapped lambda " + num(est.value) + " above -log 2 + 0.02");
    worst = std::max(worst, est.value);
  }
  return "margin=11/12, contraction=" + num(cert.contraction) +
         ", worst trapped lambda=" + num(worst);
}

// 6. The admissible atlas grows with L and its parameters deliver fast
// expansion at vanishing noise.
std::string criterion6() {
  const std::vector<double> Ls = {1e3, 1e4, 1e5, 1e6};
  double prev_measure = -1.0, prev_median = -1e300;
  std::string detail = "measures";
  for (double L : Ls) {
    auto s = default_schedule(L);
    auto w = compute_A_set(profile(), L, s.eps0, s.K1, s.K2);
    ACC_CHECK(w.A.measure() > prev_measure,
              "m(A) not increasing at L=" + num(L));
    ACC_CHECK(w.component_count <= 4,
              std::to_string(w.component_count) + " components at L=" + num(L));
    prev_measure = w.A.measure();
    detail += " " + num(w.A.measure());

    double b2 =
        compute_I_K(make_params(0.0, L, profile()), 2.0).largest_component();
    double eps = std::max(1.01 * b2 / 2.0, 4.0 / L);
    std::vector<double> ratios;
    for (int i = 0; i < 32; ++i) {
      double a = w.A.point_at_fraction((i + 0.5) / 32.0);
      auto est =
          birkhoff_lyapunov(make_params(a, L, profile()), eps, 5000 + i,
                            100000, 10000, 4, static_cast<std::uint64_t>(i)
                                                  << 20);
      double r = est.value / std::log(L);
      if (L == 1e5)
        ACC_CHECK(r >= 0.3, "lambda/logL " + num(r) + " < 0.3 at L=1e5, a=" +
                                num(a));
      ratios.push_back(r);
    }
    double med = median(ratios);
    ACC_CHECK(med >= prev_median, "median lambda/logL fell to " + num(med) +
                                      " at L=" + num(L));
    prev_median = med;
  }
  return detail + "; medians end at " + num(prev_median);
}

// 7. Arcs of length 1e-3 cover the circle within the growth-rate-2 budget
// ceil(log 1e3 / log 2) + 3 = 13 at eps = 1.01 b_2 / 2.
std::string criterion7() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t worst = 0;
  for (double L : {1e2, 1e3}) {
    double b2 =
        compute_I_K(make_params(0.0, L, profile()), 2.0).largest_component();
    double eps = 1.01 * b2 / 2.0;
    for (int t = 0; t < 16; ++t) {
      double c = u(gen);
      double a = u(gen);
      auto res = ergodic_cover_check(make_params(a, L, profile()), eps,
                                     ArcSet::arc(c, c + 1e-3), 64);
      ACC_CHECK(res.covered, "arc " + std::to_string(t) + " at L=" + num(L) +
                                 " stalled at measure " +
                                 num(res.final_measure));
      ACC_CHECK(res.steps <= 13, "cover took " + std::to_string(res.steps) +
                                     " steps at L=" + num(L));
      worst = std::max(worst, res.steps);
    }
  }
  return "32 arcs, worst cover " + std::to_string(worst) + " steps (<= 13)";
}

// 8. |integral of log|tau'| over I_1| stays within [0.5, 1.0] of the
// asymptotic envelope 2N / (L inf_{I_1}|psi''|).
std::string criterion8() {
  double lo = 2.0, hi = 0.0;
  for (double L : {1e2, 1e3, 1e4, 1e5}) {
    auto p = make_params(0.0, L, profile());
    double v = log_integral_I1(p);
    auto I1 = compute_I_K(p, 1.0);
    double inf = 1e300;
    for (const auto& arc : I1.arcs())
      for (int k = 0; k <= 2000; ++k) {
        double x = arc.lo + (arc.hi - arc.lo) * k / 2000.0;
        inf = std::min(inf, std::fabs(p.psi.deriv2(x)));
      }
    double envelope = 2.0 * 2.0 / inf;  // N = 2 folds
    double ratio = std::fabs(v) * L / envelope;
    ACC_CHECK(ratio >= 0.5 && ratio <= 1.0,
              "ratio " + num(ratio) + " outside [0.5, 1.0] at L=" + num(L));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return "ratio range [" + num(lo) + ", " + num(hi) + "]";
}

// 9. Sweep outputs are a pure function of (config, seed), whatever the
// worker count.
std::string criterion9() {
  auto cfg = parse_config(
      R"({"a_grid": 4, "L_grid": [100],
          "eps_rule": {"kind": "power", "c": 1.0, "beta": 0.5},
          "estimator": {"n_steps": 20000, "burn_in": 2000, "n_replicas": 4,
                        "n_cells": 256},
          "master_seed": 11})");
  fs::path base = fs::temp_directory_path();
  const char* names[3] = {"rcmap_acc_A", "rcmap_acc_B", "rcmap_acc_C"};
  int workers[3] = {1, 1, 8};
  std::string results[3], summaries[3], lambdas[3];
  for (int k = 0; k < 3; ++k) {
    fs::path dir = base / names[k];
    fs::remove_all(dir);
    cfg.output_dir = dir.string();
    cfg.workers = workers[k];
    auto out = run_sweep(cfg);
    ACC_CHECK(out.exit_code == 0,
              "sweep exit " + std::to_string(out.exit_code));
    results[k] = read_file((dir / "results.csv").string());
    summaries[k] = read_file((dir / "summary.json").string());
    lambdas[k] = read_file((dir / "plotdata" / "lambda_vs_a.csv").string());
  }
  ACC_CHECK(results[0] == results[1], "rerun changed results.csv");
  ACC_CHECK(summaries[0] == summaries[1], "rerun changed summary.json");
  ACC_CHECK(lambdas[0] == lambdas[1], "rerun changed lambda_vs_a.csv");
  ACC_CHECK(results[0] == results[2], "worker count changed results.csv");
  ACC_CHECK(summaries[0] == summaries[2], "worker count changed summary.json");
  ACC_CHECK(lambdas[0] == lambdas[2], "worker count changed lambda_vs_a.csv");
  for (const char* n : names) fs::remove_all(base / n);
  return "rerun and 1-vs-8-worker outputs byte-identical";
}

}  // namespace

int main() {
  std::string (*checks[9])() = {criterion1, criterion2, criterion3,
                                criterion4, criterion5, criterion6,
                                criterion7, criterion8, criterion9};
  bool all_pass = true;
  for (int k = 0; k < 9; ++k) {
    std::string verdict;
    try {
      std::string detail = checks[k]();
      verdict = "PASS (" + detail + ")";
    } catch (const CheckFail& f) {
      verdict = "FAIL (" + f.msg + ")";
      all_pass = false;
    } catch (const std::exception& e) {
      verdict = std::string("FAIL (unhandled: ") + e.what() + ")";
      all_pass = false;
    }
    std::printf("criterion %d: %s\n", k + 1, verdict.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
