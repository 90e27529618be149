#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcmap/arcset.hpp"
#include "rcmap/map.hpp"

namespace rcmap {

struct Grid {
  std::size_t n_cells = 0;  // >= 2; cells C_j = [j/n, (j+1)/n)
  double width() const { return 1.0 / static_cast<double>(n_cells); }
  double midpoint(std::size_t j) const {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(n_cells);
  }
};

struct UlamMeta {
  double a = 0.0;
  double L = 0.0;
  double eps = 0.0;
  std::size_t n_cells = 0;
  int quad_order = 0;
  std::string psi_json;
};

// Row-stochastic Ulam discretization of the kick kernel, CSR storage.
// Entries are nonnegative and every row sums to 1 within 1e-12 (checked at
// assembly).
class UlamMatrix {
 public:
  UlamMatrix(std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> cols,
             std::vector<double> vals, UlamMeta meta);

  std::size_t n() const { return meta_.n_cells; }
  const UlamMeta& meta() const { return meta_; }
  const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t>& cols() const { return cols_; }
  const std::vector<double>& vals() const { return vals_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(vals_.size()); }

  double row_sum(std::size_t i) const;  // compensated
  // out = P^T m: push a mass vector forward one step. Single-threaded,
  // deterministic.
  void apply_transpose(const std::vector<double>& m,
                       std::vector<double>& out) const;

 private:
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
  UlamMeta meta_;
};

// P[i][j] = n * integral over C_i of p(x, C_j) dx, Gauss-Legendre per
// monotone piece of the cell; the overlap of the kick window with each cell
// is exact. eps = 1/2 short-circuits to exactly uniform rows. workers > 1
// parallelizes over rows with schedule-independent output.
UlamMatrix build_ulam(const MapParams& p, double eps, const Grid& g,
                      int quad_order = 8, int workers = 1);

struct DensityVector {
  std::vector<double> rho;  // per-unit-length cell densities, >= 0
  double residual = 0.0;    // L1 gap of the last two normalized iterates
  std::size_t iterations = 0;
  bool converged = false;

  double mass() const;  // (1/n) sum rho
  double sup() const;
};

// Power iteration on the transpose action, normalized to unit mass each
// step. Non-convergence is reported in the flags, not thrown; the residual
// tells the caller how far it got.
DensityVector stationary_density(
    const UlamMatrix& P, double tol = 1e-10, std::size_t max_iter = 100000,
    const std::optional<std::vector<double>>& init = std::nullopt);

struct DensityBoundReport {
  double sup_density = 0.0;
  double bound = 0.0;        // 1 / (2 eps)
  double delta_grid = 0.0;   // 2 / (n eps), the one-cell smearing collar
  bool pass = false;
};

DensityBoundReport check_density_sup_bound(const DensityVector& d, double eps);

// (1 / 4 eps^2) * max_z m(B_eps(z) intersect tau^{-1} B_eps(x0)). The
// maximum over window positions is exact: the overlap is piecewise linear in
// z with breakpoints where a window endpoint meets a preimage arc endpoint.
double refined_density_bound(const MapParams& p, double eps, double x0);

struct CoverResult {
  bool covered = false;
  std::size_t steps = 0;      // first i with measure(J_i) = 1 when covered
  double final_measure = 0.0;
};

// Iterates J <- B_eps(tau(J)) up to max_steps.
CoverResult ergodic_cover_check(const MapParams& p, double eps,
                                const ArcSet& J0, std::size_t max_steps);

// Binary CSR payload plus JSON sidecar header at path + ".bin" / ".json".
void save_ulam(const UlamMatrix& P, const std::string& path_base);
UlamMatrix load_ulam(const std::string& path_base);

void save_density_csv(const DensityVector& d, const std::string& path);

}  // namespace rcmap
