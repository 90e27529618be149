#include "rcmap/map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcmap/circle.hpp"
#include "rcmap/detail/rootscan.hpp"
#include "rcmap/errors.hpp"

namespace rcmap {

namespace {

std::size_t scan_points(const MapParams& p, const ScanOptions& opt) {
  if (opt.points) return opt.points;
  std::size_t k = std::max<std::size_t>(p.psi.max_harmonic(), 1);
  return std::max<std::size_t>(4096, 512 * k);
}

}  // namespace

MapParams make_params(double a, double L, PsiSpec psi) {
  if (!(a >= 0.0 && a < 1.0))
    throw std::invalid_argument("rotation a must lie in [0, 1)");
  if (!(L >= 0.0) || !std::isfinite(L))
    throw std::invalid_argument("amplitude L must be >= 0");
  return MapParams{a, L, std::move(psi)};
}

double eval_tau(const MapParams& p, double x) {
  return mod1(p.a + x + p.L * p.psi.eval(x));
}

double eval_tau_prime(const MapParams& p, double x) {
  return 1.0 + p.L * p.psi.deriv(x);
}

double tau_lift(const MapParams& p, double x) {
  return p.a + x + p.L * p.psi.eval(x);
}

ArcSet detail_map::sublevel_set(const MapParams& p, double K,
                                const ScanOptions& opt) {
  auto over = [&p, K](double x) {
    return std::fabs(eval_tau_prime(p, x)) - K;
  };
  if (p.L == 0.0 || p.psi.flat())
    return over(0.0) <= 0.0 ? ArcSet::full() : ArcSet{};

  // |1 + L psi'| <= K is the band (-K-1)/L <= psi' <= (K-1)/L. Component
  // endpoints are roots of the two L-independent level functions of psi',
  // so the scan resolution never needs to grow with L even though the
  // components themselves shrink like K/L.
  std::size_t pts = scan_points(p, opt);
  double c_hi = (K - 1.0) / p.L;
  double c_lo = (-K - 1.0) / p.L;
  std::vector<double> roots;
  for (double c : {c_hi, c_lo}) {
    auto level = [&p, c](double x) { return p.psi.deriv(x) - c; };
    std::vector<double> r =
        detail::circle_roots(level, pts, opt.root_tol, opt.verify);
    roots.insert(roots.end(), r.begin(), r.end());
  }
  std::sort(roots.begin(), roots.end());
  if (roots.empty())
    return over(0.0) <= 0.0 ? ArcSet::full() : ArcSet{};
  std::vector<Arc> keep;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    double lo = roots[i];
    double hi = (i + 1 < roots.size()) ? roots[i + 1] : roots[0] + 1.0;
    if (!(hi > lo)) continue;
    if (over(mod1(0.5 * (lo + hi))) <= 0.0) keep.push_back({lo, hi});
  }
  return ArcSet::from_arcs(std::move(keep));
}

ArcSet compute_I_K(const MapParams& p, double K, const ScanOptions& opt) {
  if (!(K >= 1.0)) throw std::invalid_argument("K must be >= 1");
  return detail_map::sublevel_set(p, K, opt);
}

double largest_component_length(const ArcSet& s) {
  return s.largest_component();
}

std::vector<double> tau_critical_points(const MapParams& p,
                                        const ScanOptions& opt) {
  if (p.L == 0.0 || p.psi.flat()) return {};
  // tau' = 0 is the level psi' = -1/L; scanning psi' keeps the grid
  // requirement independent of L
  double c = -1.0 / p.L;
  auto level = [&p, c](double x) { return p.psi.deriv(x) - c; };
  std::vector<double> folds = detail::circle_roots(
      level, scan_points(p, opt), opt.root_tol, opt.verify);
  double floor = p.L * p.psi.nondegeneracy_floor();
  for (double z : folds) {
    if (std::fabs(p.L * p.psi.deriv2(z)) < floor)
      throw TangentRoot("fold at x=" + std::to_string(z) +
                        " fails the curvature floor");
  }
  return folds;
}

namespace {

// Split one stored arc at interior folds; returns lift-monotone pieces as
// [lo, hi] in unrolled coordinates (hi may exceed 1).
std::vector<std::pair<double, double>> monotone_pieces(
    const Arc& a, const std::vector<double>& folds) {
  std::vector<double> cuts;
  cuts.push_back(a.lo);
  for (double f : folds) {
    for (double cand : {f, f + 1.0}) {
      if (cand > a.lo + 1e-13 && cand < a.hi - 1e-13) cuts.push_back(cand);
    }
  }
  cuts.push_back(a.hi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    pieces.emplace_back(cuts[i], cuts[i + 1]);
  return pieces;
}

}  // namespace

ArcSet image_arcset(const MapParams& p, const ArcSet& A, double r,
                    const std::vector<double>& folds) {
  if (A.empty()) return {};
  if (A.is_full()) return ArcSet::full();
  std::vector<Arc> images;
  for (const Arc& a : A.arcs()) {
    for (const auto& [u, v] : monotone_pieces(a, folds)) {
      double y1 = tau_lift(p, u);
      double y2 = tau_lift(p, v);
      double lo = std::min(y1, y2);
      double width = std::fabs(y2 - y1);
      if (width >= 1.0) return ArcSet::full();
      images.push_back({lo, lo + width});
    }
  }
  ArcSet img = ArcSet::from_arcs(std::move(images));
  if (r > 0.0) img = img.dilate(r);
  return img;
}

ArcSet image_arcset(const MapParams& p, const ArcSet& A, double r,
                    const ScanOptions& opt) {
  return image_arcset(p, A, r, tau_critical_points(p, opt));
}

ArcSet preimage_arc(const MapParams& p, const Arc& target,
                    const ScanOptions& opt) {
  if (!(target.hi > target.lo) || target.hi - target.lo > 1.0)
    throw std::invalid_argument("target arc malformed");
  if (target.hi - target.lo >= 1.0 - 1e-12) return ArcSet::full();
  double t1 = target.lo, t2 = target.hi;

  std::vector<double> folds = tau_critical_points(p, opt);
  std::vector<double> cuts;
  cuts.reserve(folds.size() + 2);
  cuts.push_back(0.0);
  for (double f : folds)
    if (f > 1e-13 && f < 1.0 - 1e-13) cuts.push_back(f);
  cuts.push_back(1.0);

  std::vector<Arc> hits;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double u = cuts[i], v = cuts[i + 1];
    double fu = tau_lift(p, u), fv = tau_lift(p, v);
    bool rising = fv >= fu;
    double lo = std::min(fu, fv), hi = std::max(fu, fv);

    // lift must be monotone between adjacent folds
    double mid_slope = eval_tau_prime(p, 0.5 * (u + v));
    if ((mid_slope > 0.0) != rising && std::fabs(mid_slope) > 1e-9)
      throw ScanTooCoarse("fold list misses a slope change");

    auto lift = [&p](double x) { return tau_lift(p, x); };
    for (double k = std::floor(lo - t2) - 1.0; t1 + k <= hi + 1.0; k += 1.0) {
      double w1 = std::max(t1 + k, lo);
      double w2 = std::min(t2 + k, hi);
      if (w2 < w1) continue;
      // invert the lift at w1 and w2 by bisection
      auto invert = [&](double y) {
        auto g = [&lift, y](double x) { return lift(x) - y; };
        double gu = fu - y, gv = fv - y;
        if (gu == 0.0) return u;
        if (gv == 0.0) return v;
        return detail::bisect(g, u, v, gu, gv, opt.root_tol);
      };
      double x1 = invert(rising ? w1 : w2);
      double x2 = invert(rising ? w2 : w1);
      if (x2 < x1) std::swap(x1, x2);
      hits.push_back({x1, x2});
    }
  }
  return ArcSet::from_arcs(std::move(hits));
}

}  // namespace rcmap
