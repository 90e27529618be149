#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcmap/psi.hpp"

namespace rcmap {

struct EpsRule {
  enum class Kind { constant, power, schedule };
  Kind kind = Kind::constant;
  double value = 0.5;  // constant
  double c = 1.0;      // power: c * L^(beta - 1), clamped at 1/2
  double beta = 0.5;

  double eval(double L) const;
  std::string describe() const;
};

struct EstimatorSettings {
  std::uint64_t n_steps = 1000000;
  std::uint64_t burn_in = 10000;
  std::uint32_t n_replicas = 16;
  std::size_t n_cells = 1024;
  int quad_order = 8;
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct SweepConfig {
  PsiSpec psi = PsiSpec::default_profile();
  std::vector<double> a_values;  // resolved grid
  std::vector<double> L_grid;
  EpsRule eps_rule;
  EstimatorSettings est;
  std::uint64_t master_seed = 0;
  std::string output_dir = "sweep_out";
  bool do_density = true;
  bool do_cover = true;
  bool do_atlas = true;
  double cover_arc_len = 1e-3;
  std::size_t cover_max_steps = 64;
  int workers = 1;
};

SweepConfig parse_config(const std::string& json_text);
SweepConfig load_config(const std::string& path);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Structural checks plus the ergodicity advisory: eps below b_2(L)/2 for
// some L draws a warning (estimates may mix invariant components), not an
// error.
ValidationReport validate_config(const SweepConfig& cfg);

// One (a, L) cell of a sweep. Missing values (failed stage, disabled suite)
// serialize as empty fields; status holds "ok" or the failing error class.
struct ResultRecord {
  std::size_t cell = 0;
  double a = 0.0, L = 0.0, eps = 0.0;
  double lambda_mc = 0.0, lambda_se = 0.0;
  bool has_mc = false;
  double lambda_quad = 0.0;
  double mean_abs_slope = 0.0;
  bool has_quad = false;
  double sup_density = 0.0, density_bound = 0.0, density_residual = 0.0;
  long cover_steps = -1;  // -1: did not cover within max_steps
  bool has_cover = false;
  int in_A_L = -1;  // -1: atlas disabled or L out of schedule range
  std::string status = "ok";
  double wall_ms = 0.0;  // excluded from results.csv; goes to timings.csv
};

struct SweepOutcome {
  int exit_code = 0;  // 0 all cells ok, 2 partial failure
  std::size_t cells_failed = 0;
  std::vector<ResultRecord> records;
};

// Executes the grid and writes results.csv, timings.csv, summary.json and
// plotdata/ under cfg.output_dir. Every byte of results.csv, summary.json
// and plotdata/ is a pure function of (config, master_seed); wall-clock
// readings live only in timings.csv.
SweepOutcome run_sweep(const SweepConfig& cfg);

void emit_plotdata(const SweepConfig& cfg,
                   const std::vector<ResultRecord>& records,
                   const std::string& dir);

}  // namespace rcmap
