#include "rcmap/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rcmap/circle.hpp"
#include "rcmap/detail/kahan.hpp"
#include "rcmap/errors.hpp"
#include "rcmap/io.hpp"
#include "rcmap/parallel.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap {

UlamMatrix::UlamMatrix(std::vector<std::int64_t> row_ptr,
                       std::vector<std::int32_t> cols,
                       std::vector<double> vals, UlamMeta meta)
    : row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      vals_(std::move(vals)),
      meta_(std::move(meta)) {}

double UlamMatrix::row_sum(std::size_t i) const {
  detail::Kahan acc;
  for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    acc.add(vals_[k]);
  return acc.value();
}

void UlamMatrix::apply_transpose(const std::vector<double>& m,
                                 std::vector<double>& out) const {
  std::size_t nc = n();
  out.assign(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    double mi = m[i];
    if (mi == 0.0) continue;
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      out[cols_[k]] += vals_[k] * mi;
  }
}

namespace {

struct RowEntry {
  std::int32_t col;
  double val;
};

// One row of the discretized kernel: source cell [i/n, (i+1)/n], split at
// folds, Gauss-Legendre nodes per piece, exact window/cell overlaps through
// the lift (windows never wrap in unrolled coordinates).
void build_row(const MapParams& p, double eps, std::size_t n, int quad_order,
               const std::vector<double>& folds, std::size_t i,
               std::vector<RowEntry>& row) {
  row.clear();
  const GaussRule& g = gauss_rule(quad_order);
  double lo = static_cast<double>(i) / n;
  double hi = static_cast<double>(i + 1) / n;

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double f : folds)
    if (f > lo + 1e-13 && f < hi - 1e-13) cuts.push_back(f);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  struct Node {
    double y;  // lift value
    double w;  // n * piece_len * gl_weight
  };
  std::vector<Node> nodes;
  nodes.reserve(g.nodes.size() * (cuts.size() - 1));
  double ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double u = cuts[c], v = cuts[c + 1];
    double len = v - u;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      double x = u + len * g.nodes[q];
      double y = tau_lift(p, x);
      nodes.push_back({y, static_cast<double>(n) * len * g.weights[q]});
      if (first || y < ymin) ymin = y;
      if (first || y > ymax) ymax = y;
      first = false;
    }
  }

  double nd = static_cast<double>(n);
  double inv2eps = 1.0 / (2.0 * eps);
  std::int64_t base =
      static_cast<std::int64_t>(std::floor((ymin - eps) * nd)) - 1;
  std::int64_t top =
      static_cast<std::int64_t>(std::floor((ymax + eps) * nd)) + 1;
  std::size_t range = static_cast<std::size_t>(top - base + 1);

  if (range >= n) {
    // window sweep covers the circle; accumulate mod n directly
    std::vector<double> dense(n, 0.0);
    for (const Node& nd_q : nodes) {
      std::int64_t m0 =
          static_cast<std::int64_t>(std::floor((nd_q.y - eps) * nd));
      std::int64_t m1 =
          static_cast<std::int64_t>(std::floor((nd_q.y + eps) * nd));
      for (std::int64_t m = m0; m <= m1; ++m) {
        double cl = static_cast<double>(m) / nd;
        double cr = static_cast<double>(m + 1) / nd;
        double ov = std::min(nd_q.y + eps, cr) - std::max(nd_q.y - eps, cl);
        if (ov > 0.0)
          dense[static_cast<std::size_t>(((m % static_cast<std::int64_t>(n)) +
                                          static_cast<std::int64_t>(n)) %
                                         static_cast<std::int64_t>(n))] +=
              nd_q.w * ov * inv2eps;
      }
    }
    for (std::size_t j = 0; j < n; ++j)
      if (dense[j] != 0.0)
        row.push_back({static_cast<std::int32_t>(j), dense[j]});
    return;
  }

  std::vector<double> acc(range, 0.0);
  for (const Node& nd_q : nodes) {
    std::int64_t m0 =
        static_cast<std::int64_t>(std::floor((nd_q.y - eps) * nd));
    std::int64_t m1 =
        static_cast<std::int64_t>(std::floor((nd_q.y + eps) * nd));
    for (std::int64_t m = m0; m <= m1; ++m) {
      double cl = static_cast<double>(m) / nd;
      double cr = static_cast<double>(m + 1) / nd;
      double ov = std::min(nd_q.y + eps, cr) - std::max(nd_q.y - eps, cl);
      if (ov > 0.0) acc[static_cast<std::size_t>(m - base)] += nd_q.w * ov * inv2eps;
    }
  }
  std::int64_t nn = static_cast<std::int64_t>(n);
  for (std::size_t k = 0; k < range; ++k) {
    if (acc[k] == 0.0) continue;
    std::int64_t col = (base + static_cast<std::int64_t>(k)) % nn;
    if (col < 0) col += nn;
    row.push_back({static_cast<std::int32_t>(col), acc[k]});
  }
  std::sort(row.begin(), row.end(),
            [](const RowEntry& x, const RowEntry& y) { return x.col < y.col; });
}

}  // namespace

UlamMatrix build_ulam(const MapParams& p, double eps, const Grid& g,
                      int quad_order, int workers) {
  if (eps == 0.0)
    throw EpsilonZero("eps = 0: kernel is singular, no Ulam build");
  if (!(eps > 0.0) || eps > 0.5)
    throw std::invalid_argument("eps must lie in (0, 1/2]");
  if (g.n_cells < 2) throw std::invalid_argument("grid needs >= 2 cells");
  if (g.n_cells > (1u << 30)) throw std::invalid_argument("grid too large");
  if (quad_order < 1) throw std::invalid_argument("quad_order must be >= 1");
  double n = static_cast<double>(g.n_cells);
  if (eps * n < 4.0)
    throw KernelUnderresolved("eps * n_cells = " + fmt_double(eps * n) +
                              " < 4: kick window narrower than the grid");

  UlamMeta meta{p.a, p.L, eps, g.n_cells, quad_order, p.psi.to_json()};
  std::size_t nc = g.n_cells;

  if (2.0 * eps >= 1.0) {
    // complete smearing: kernel constant, rows exactly uniform
    std::vector<std::int64_t> rp(nc + 1);
    std::vector<std::int32_t> cols(nc * nc);
    std::vector<double> vals(nc * nc, 1.0 / n);
    for (std::size_t i = 0; i <= nc; ++i)
      rp[i] = static_cast<std::int64_t>(i * nc);
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = 0; j < nc; ++j)
        cols[i * nc + j] = static_cast<std::int32_t>(j);
    return UlamMatrix(std::move(rp), std::move(cols), std::move(vals),
                      std::move(meta));
  }

  std::vector<double> folds = tau_critical_points(p);
  std::vector<std::vector<RowEntry>> rows(nc);
  parallel_for(nc, workers, [&](std::size_t i) {
    build_row(p, eps, nc, quad_order, folds, i, rows[i]);
  });

  std::vector<std::int64_t> rp(nc + 1, 0);
  for (std::size_t i = 0; i < nc; ++i)
    rp[i + 1] = rp[i] + static_cast<std::int64_t>(rows[i].size());
  std::vector<std::int32_t> cols(static_cast<std::size_t>(rp[nc]));
  std::vector<double> vals(static_cast<std::size_t>(rp[nc]));
  for (std::size_t i = 0; i < nc; ++i) {
    std::int64_t at = rp[i];
    for (const RowEntry& e : rows[i]) {
      cols[at] = e.col;
      vals[at] = e.val;
      ++at;
    }
  }
  UlamMatrix P(std::move(rp), std::move(cols), std::move(vals),
               std::move(meta));
  for (std::size_t i = 0; i < nc; ++i) {
    double s = P.row_sum(i);
    if (std::fabs(s - 1.0) > 1e-12)
      throw Error("row " + std::to_string(i) + " sums to " + fmt_double(s));
  }
  return P;
}

double DensityVector::mass() const {
  detail::Kahan acc;
  for (double r : rho) acc.add(r);
  return acc.value() / static_cast<double>(rho.size());
}

double DensityVector::sup() const {
  double m = 0.0;
  for (double r : rho) m = std::max(m, r);
  return m;
}

DensityVector stationary_density(const UlamMatrix& P, double tol,
                                 std::size_t max_iter,
                                 const std::optional<std::vector<double>>& init) {
  std::size_t n = P.n();
  std::vector<double> m(n, 1.0 / static_cast<double>(n));
  if (init) {
    if (init->size() != n) throw std::invalid_argument("init size mismatch");
    detail::Kahan total;
    for (double v : *init) {
      if (v < 0.0) throw std::invalid_argument("init must be nonnegative");
      total.add(v);
    }
    if (total.value() <= 0.0) throw std::invalid_argument("init must have mass");
    for (std::size_t j = 0; j < n; ++j) m[j] = (*init)[j] / total.value();
  }

  std::vector<double> next(n);
  DensityVector d;
  d.residual = 1.0;
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    P.apply_transpose(m, next);
    detail::Kahan total;
    for (double v : next) total.add(v);
    double norm = total.value();
    for (double& v : next) v /= norm;
    detail::Kahan gap;
    for (std::size_t j = 0; j < n; ++j) gap.add(std::fabs(next[j] - m[j]));
    d.residual = gap.value();
    m.swap(next);
    if (d.residual <= tol) {
      ++it;
      break;
    }
  }
  d.iterations = it;
  d.converged = d.residual <= tol;
  d.rho.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    d.rho[j] = m[j] * static_cast<double>(n);
  return d;
}

DensityBoundReport check_density_sup_bound(const DensityVector& d,
                                           double eps) {
  DensityBoundReport r;
  r.sup_density = d.sup();
  r.bound = 1.0 / (2.0 * eps);
  r.delta_grid = 2.0 / (static_cast<double>(d.rho.size()) * eps);
  r.pass = r.sup_density <= (1.0 + r.delta_grid) * r.bound;
  return r;
}

double refined_density_bound(const MapParams& p, double eps, double x0) {
  if (!(eps > 0.0)) throw EpsilonZero("refined bound needs eps > 0");
  if (2.0 * eps >= 1.0) return 1.0;  // everything is the full circle

  ArcSet pre = preimage_arc(p, Arc{x0 - eps, x0 + eps});
  if (pre.empty()) return 0.0;
  if (pre.is_full()) return (2.0 * eps) / (4.0 * eps * eps);

  double best = 0.0;
  auto probe = [&](double center) {
    ArcSet window = ArcSet::arc(center - eps, center + eps);
    double ov = ArcSet::intersect(pre, window).measure();
    if (ov > best) best = ov;
  };
  for (const Arc& a : pre.arcs()) {
    probe(a.lo + eps);
    probe(a.lo - eps);
    probe(a.hi + eps);
    probe(a.hi - eps);
  }
  return best / (4.0 * eps * eps);
}

CoverResult ergodic_cover_check(const MapParams& p, double eps,
                                const ArcSet& J0, std::size_t max_steps) {
  if (J0.empty()) throw std::invalid_argument("seed set must be nonempty");
  std::vector<double> folds = tau_critical_points(p);
  ArcSet J = J0;
  CoverResult r;
  for (std::size_t i = 1; i <= max_steps; ++i) {
    J = image_arcset(p, J, eps, folds);
    if (J.is_full()) {
      r.covered = true;
      r.steps = i;
      r.final_measure = 1.0;
      return r;
    }
  }
  r.covered = false;
  r.steps = max_steps;
  r.final_measure = J.measure();
  return r;
}

void save_ulam(const UlamMatrix& P, const std::string& path_base) {
  nlohmann::ordered_json j;
  j["n"] = P.n();
  j["a"] = P.meta().a;
  j["L"] = P.meta().L;
  j["eps"] = P.meta().eps;
  j["quad_order"] = P.meta().quad_order;
  j["psi"] = nlohmann::json::parse(P.meta().psi_json);
  j["nnz"] = P.nnz();
  write_file(path_base + ".json", j.dump(2) + "\n");

  std::ofstream out(path_base + ".bin", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path_base + ".bin");
  const char magic[8] = {'U', 'L', 'A', 'M', 'C', 'S', 'R', '1'};
  out.write(magic, 8);
  std::uint64_t n = P.n(), nnz = static_cast<std::uint64_t>(P.nnz());
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&nnz), 8);
  out.write(reinterpret_cast<const char*>(P.row_ptr().data()),
            static_cast<std::streamsize>((n + 1) * sizeof(std::int64_t)));
  out.write(reinterpret_cast<const char*>(P.cols().data()),
            static_cast<std::streamsize>(nnz * sizeof(std::int32_t)));
  out.write(reinterpret_cast<const char*>(P.vals().data()),
            static_cast<std::streamsize>(nnz * sizeof(double)));
  if (!out) throw Error("write failed for " + path_base + ".bin");
}

UlamMatrix load_ulam(const std::string& path_base) {
  nlohmann::json j = nlohmann::json::parse(read_file(path_base + ".json"));
  UlamMeta meta;
  meta.a = j.at("a").get<double>();
  meta.L = j.at("L").get<double>();
  meta.eps = j.at("eps").get<double>();
  meta.n_cells = j.at("n").get<std::size_t>();
  meta.quad_order = j.at("quad_order").get<int>();
  meta.psi_json = j.at("psi").dump();

  std::ifstream in(path_base + ".bin", std::ios::binary);
  if (!in) throw Error("cannot open " + path_base + ".bin");
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "ULAMCSR1", 8) != 0)
    throw Error("bad matrix file magic");
  std::uint64_t n = 0, nnz = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&nnz), 8);
  if (n != meta.n_cells) throw Error("sidecar/body size mismatch");
  std::vector<std::int64_t> rp(n + 1);
  std::vector<std::int32_t> cols(nnz);
  std::vector<double> vals(nnz);
  in.read(reinterpret_cast<char*>(rp.data()),
          static_cast<std::streamsize>((n + 1) * sizeof(std::int64_t)));
  in.read(reinterpret_cast<char*>(cols.data()),
          static_cast<std::streamsize>(nnz * sizeof(std::int32_t)));
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(nnz * sizeof(double)));
  if (!in) throw Error("truncated matrix file");
  return UlamMatrix(std::move(rp), std::move(cols), std::move(vals),
                    std::move(meta));
}

void save_density_csv(const DensityVector& d, const std::string& path) {
  std::string text = "cell_index,cell_midpoint,density\n";
  std::size_t n = d.rho.size();
  Grid g{n};
  for (std::size_t j = 0; j < n; ++j)
    text += csv_line({std::to_string(j), fmt_double(g.midpoint(j)),
                      fmt_double(d.rho[j])});
  write_file(path, text);
}

}  // namespace rcmap
