#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcmap/atlas.hpp"
#include "rcmap/circle.hpp"
#include "rcmap/errors.hpp"
#include "rcmap/io.hpp"
#include "rcmap/lyapunov.hpp"
#include "rcmap/map.hpp"
#include "rcmap/noise.hpp"
#include "rcmap/sink.hpp"
#include "rcmap/sweep.hpp"
#include "rcmap/transfer.hpp"

namespace {

using namespace rcmap;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<double> a;
  std::optional<double> L;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file");
  sub->add_option("--seed", o.seed, "override master_seed");
  sub->add_option("--out", o.out, "override output_dir");
  sub->add_option("--workers", o.workers, "override worker count");
}

void add_cell(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--a", o.a, "rotation parameter (default: first of a grid)");
  sub->add_option("--L", o.L, "forcing amplitude (default: first of L grid)");
}

SweepConfig resolve(const CommonOpts& o) {
  SweepConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  return cfg;
}

double pick_a(const CommonOpts& o, const SweepConfig& cfg) {
  if (o.a) return *o.a;
  if (!cfg.a_values.empty()) return cfg.a_values.front();
  throw ConfigError("no rotation parameter: pass --a or an a_grid");
}

double pick_L(const CommonOpts& o, const SweepConfig& cfg) {
  if (o.L) return *o.L;
  if (!cfg.L_grid.empty()) return cfg.L_grid.front();
  throw ConfigError("no amplitude: pass --L or an L_grid");
}

void print_warnings(const ValidationReport& rep) {
  for (const std::string& w : rep.warnings)
    std::cerr << "warning: " << w << "\n";
}

int cmd_lyap(const CommonOpts& o) {
  SweepConfig cfg = resolve(o);
  double a = pick_a(o, cfg), L = pick_L(o, cfg);
  double eps = cfg.eps_rule.eval(L);
  MapParams p = make_params(a, L, cfg.psi);
  LyapunovEstimate est = birkhoff_lyapunov(
      p, eps, cfg.master_seed, cfg.est.n_steps, cfg.est.burn_in,
      cfg.est.n_replicas, 0, cfg.workers);
  JensenReport jr = jensen_upper_check(est, p);
  std::cout << estimate_csv_header() << estimate_csv_row(est);
  std::cout << "jensen_upper: " << (jr.pass ? "pass" : "FAIL")
            << " (value " << fmt_double(jr.value) << " vs "
            << fmt_double(jr.refined_rhs) << ")\n";
  return 0;
}

int cmd_density(const CommonOpts& o) {
  SweepConfig cfg = resolve(o);
  double a = pick_a(o, cfg), L = pick_L(o, cfg);
  double eps = cfg.eps_rule.eval(L);
  MapParams p = make_params(a, L, cfg.psi);
  UlamMatrix P = build_ulam(p, eps, Grid{cfg.est.n_cells},
                            cfg.est.quad_order, cfg.workers);
  DensityVector d = stationary_density(P, cfg.est.tol, cfg.est.max_iter);
  DensityBoundReport b = check_density_sup_bound(d, eps);
  LyapunovEstimate q = quadrature_lyapunov(p, d);

  std::filesystem::create_directories(cfg.output_dir);
  std::string path = cfg.output_dir + "/density.csv";
  save_density_csv(d, path);
  std::cout << "a=" << fmt_double(a) << " L=" << fmt_double(L)
            << " eps=" << fmt_double(eps)
            << " sup_density=" << fmt_double(b.sup_density)
            << " bound=" << fmt_double(b.bound)
            << " bound_ok=" << (b.pass ? 1 : 0)
            << " residual=" << fmt_double(d.residual)
            << " iterations=" << d.iterations
            << " converged=" << (d.converged ? 1 : 0)
            << " lambda_quad=" << fmt_double(q.value) << "\n";
  std::cout << "wrote " << path << "\n";
  return d.converged ? 0 : 2;
}

int cmd_atlas(const CommonOpts& o) {
  SweepConfig cfg = resolve(o);
  if (cfg.L_grid.empty() && o.L) cfg.L_grid = {*o.L};
  if (cfg.L_grid.empty())
    throw ConfigError("no amplitude: pass --L or an L_grid");
  std::filesystem::create_directories(cfg.output_dir);
  std::string all = "[\n";
  bool first = true;
  for (double L : cfg.L_grid) {
    ScheduleSpec s = default_schedule(L);
    ParameterWindow w = compute_A_set(cfg.psi, L, s.eps0, s.K1, s.K2);
    AtlasMeasureReport m = measure_report(w);
    ErgodicityThresholds th = ergodicity_thresholds(cfg.psi, L);
    std::cout << "L=" << fmt_double(L)
              << " measure_A=" << fmt_double(m.measure)
              << " components=" << w.component_count
              << " K1=" << fmt_double(s.K1) << " K2=" << fmt_double(s.K2)
              << " eps0=" << fmt_double(s.eps0)
              << " c_hat=" << fmt_double(m.c_hat)
              << " eps_threshold_general=" << fmt_double(th.eps_general)
              << " eps_threshold_large_L=" << fmt_double(th.eps_large_L)
              << "\n";
    if (!first) all += ",\n";
    all += window_to_json(w);
    first = false;
  }
  all += "\n]\n";
  std::string path = cfg.output_dir + "/atlas.json";
  write_file(path, all);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sink(const CommonOpts& o, std::size_t fold_index,
             std::uint64_t n_steps) {
  SweepConfig cfg = resolve(o);
  double L = pick_L(o, cfg);
  SinkCertificate cert = construct_sink(cfg.psi, L, fold_index);

  std::filesystem::create_directories(cfg.output_dir);
  std::string path = cfg.output_dir + "/sink_certificate.json";
  write_file(path, cert.to_json() + "\n");

  std::cout << estimate_csv_header();
  double worst = -1e300;
  for (double da : {0.0, -cert.nu / 3.0, cert.nu / 3.0}) {
    LyapunovEstimate est =
        verify_sink(cert, mod1(cert.a_z + da), cfg.master_seed, n_steps);
    worst = std::max(worst, est.value);
    std::cout << estimate_csv_row(est);
  }
  std::cout << "certificate: z=" << fmt_double(cert.z)
            << " a_z=" << fmt_double(cert.a_z)
            << " nu=" << fmt_double(cert.nu)
            << " contraction=" << fmt_double(cert.contraction)
            << " max_lambda=" << fmt_double(worst) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_erg_check(const CommonOpts& o, std::optional<double> center_opt) {
  SweepConfig cfg = resolve(o);
  double a = pick_a(o, cfg), L = pick_L(o, cfg);
  double eps = cfg.eps_rule.eval(L);
  MapParams p = make_params(a, L, cfg.psi);
  double center = center_opt
                      ? *center_opt
                      : KickStream({0.0, cfg.master_seed}, 0).unit_at(0);
  double half = 0.5 * cfg.cover_arc_len;
  CoverResult cv = ergodic_cover_check(
      p, eps, ArcSet::arc(center - half, center + half),
      cfg.cover_max_steps);
  std::cout << "a=" << fmt_double(a) << " L=" << fmt_double(L)
            << " eps=" << fmt_double(eps)
            << " arc_center=" << fmt_double(mod1(center))
            << " arc_len=" << fmt_double(cfg.cover_arc_len)
            << " covered=" << (cv.covered ? 1 : 0) << " steps=" << cv.steps
            << " final_measure=" << fmt_double(cv.final_measure) << "\n";
  return cv.covered ? 0 : 2;
}

int cmd_sweep(const CommonOpts& o) {
  SweepConfig cfg = resolve(o);
  ValidationReport rep = validate_config(cfg);
  print_warnings(rep);
  SweepOutcome out = run_sweep(cfg);
  std::cout << "cells=" << out.records.size()
            << " failed=" << out.cells_failed << " output=" << cfg.output_dir
            << "\n";
  return out.exit_code;
}

int cmd_validate(const CommonOpts& o) {
  SweepConfig cfg = resolve(o);
  ValidationReport rep = validate_config(cfg);
  print_warnings(rep);
  if (!rep.ok()) {
    for (const std::string& e : rep.errors)
      std::cerr << "error: " << e << "\n";
    return 1;
  }
  std::cout << "config ok: " << cfg.a_values.size() << " x "
            << cfg.L_grid.size() << " cells, eps rule "
            << cfg.eps_rule.describe() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomly kicked circle map laboratory"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::size_t fold_index = 0;
  std::uint64_t sink_steps = 1000000;
  std::optional<double> center;
  std::function<int()> run;

  CLI::App* lyap = app.add_subcommand(
      "lyap", "Monte Carlo Lyapunov exponent for one (a, L) cell");
  add_common(lyap, opts);
  add_cell(lyap, opts);
  lyap->callback([&] { run = [&] { return cmd_lyap(opts); }; });

  CLI::App* density = app.add_subcommand(
      "density", "stationary density and quadrature exponent for one cell");
  add_common(density, opts);
  add_cell(density, opts);
  density->callback([&] { run = [&] { return cmd_density(opts); }; });

  CLI::App* atlas = app.add_subcommand(
      "atlas", "admissible parameter windows over the L grid");
  add_common(atlas, opts);
  add_cell(atlas, opts);
  atlas->callback([&] { run = [&] { return cmd_atlas(opts); }; });

  CLI::App* sink = app.add_subcommand(
      "sink", "random sink certificate and orbit verification");
  add_common(sink, opts);
  add_cell(sink, opts);
  sink->add_option("--fold", fold_index, "fold index (default 0)");
  sink->add_option("--steps", sink_steps, "verification orbit length");
  sink->callback(
      [&] { run = [&] { return cmd_sink(opts, fold_index, sink_steps); }; });

  CLI::App* erg = app.add_subcommand(
      "erg-check", "iterate a seed arc under the fattened image map");
  add_common(erg, opts);
  add_cell(erg, opts);
  erg->add_option("--center", center, "seed arc center (default from seed)");
  erg->callback([&] { run = [&] { return cmd_erg_check(opts, center); }; });

  CLI::App* sweep = app.add_subcommand(
      "sweep", "deterministic parallel (a, L) grid sweep");
  add_common(sweep, opts);
  sweep->callback([&] { run = [&] { return cmd_sweep(opts); }; });

  CLI::App* validate = app.add_subcommand(
      "validate", "check a config without running it");
  add_common(validate, opts);
  validate->callback([&] { run = [&] { return cmd_validate(opts); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run();
  } catch (const rcmap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rcmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
