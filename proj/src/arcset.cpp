#include "rcmap/arcset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rcmap/circle.hpp"
#include "rcmap/detail/kahan.hpp"
#include "rcmap/errors.hpp"

namespace rcmap {

namespace {

constexpr double kDropTol = 1e-14;   // arcs shorter than this vanish
constexpr double kGlueTol = 1e-14;   // gaps up to this close during merging
constexpr double kFullSnap = 1e-12;  // single component this close to 1 is full
constexpr double kMemberTol = 1e-12;

// Segments are intervals inside [0, 1] with the circle cut open at 0.
using Segs = std::vector<std::pair<double, double>>;

Segs cut_open(const std::vector<Arc>& arcs) {
  Segs segs;
  segs.reserve(arcs.size() + 1);
  for (const Arc& a : arcs) {
    if (a.hi > 1.0) {
      segs.emplace_back(0.0, a.hi - 1.0);
      segs.emplace_back(a.lo, 1.0);
    } else {
      segs.emplace_back(a.lo, a.hi);
    }
  }
  std::sort(segs.begin(), segs.end());
  return segs;
}

}  // namespace

ArcSet ArcSet::full() {
  ArcSet s;
  s.arcs_.push_back({0.0, 1.0});
  return s;
}

ArcSet ArcSet::arc(double lo, double hi) {
  return from_arcs({{lo, hi}});
}

ArcSet ArcSet::from_arcs(std::vector<Arc> raw) {
  ArcSet out;
  std::vector<Arc>& arcs = out.arcs_;
  arcs.reserve(raw.size());
  for (const Arc& a : raw) {
    if (!(a.hi >= a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw std::invalid_argument("arc endpoints out of order");
    double len = a.hi - a.lo;
    if (len >= 1.0) return full();
    if (len < kDropTol) continue;
    double lo = mod1(a.lo);
    arcs.push_back({lo, lo + len});
  }
  if (arcs.empty()) return out;
  std::sort(arcs.begin(), arcs.end(),
            [](const Arc& x, const Arc& y) { return x.lo < y.lo; });

  // forward merge
  std::vector<Arc> merged;
  merged.reserve(arcs.size());
  Arc cur = arcs.front();
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    const Arc& nx = arcs[i];
    if (nx.lo <= cur.hi + kGlueTol) {
      cur.hi = std::max(cur.hi, nx.hi);
      if (cur.hi - cur.lo >= 1.0) return full();
    } else {
      merged.push_back(cur);
      cur = nx;
    }
  }
  merged.push_back(cur);

  // the last arc may wrap into the leading ones; the gap across 0 obeys the
  // same glue tolerance as interior gaps
  while (merged.size() >= 2) {
    double gap = (1.0 + merged.front().lo) - merged.back().hi;
    if (gap > kGlueTol) break;
    merged.back().hi = std::max(merged.back().hi, merged.front().hi + 1.0);
    merged.erase(merged.begin());
    if (merged.back().hi - merged.back().lo >= 1.0) return full();
  }

  if (merged.size() == 1 && merged[0].length() >= 1.0 - kFullSnap)
    return full();
  out.arcs_ = std::move(merged);
  return out;
}

bool ArcSet::is_full() const {
  return arcs_.size() == 1 && arcs_[0].lo == 0.0 && arcs_[0].hi == 1.0;
}

double ArcSet::measure() const {
  detail::Kahan acc;
  for (const Arc& a : arcs_) acc.add(a.length());
  return acc.value();
}

double ArcSet::largest_component() const {
  double m = 0.0;
  for (const Arc& a : arcs_) m = std::max(m, a.length());
  return m;
}

bool ArcSet::contains(double x) const {
  if (arcs_.empty()) return false;
  double t = mod1(x);
  // binary search for the last arc starting at or before t (with slack)
  auto it = std::upper_bound(
      arcs_.begin(), arcs_.end(), t + kMemberTol,
      [](double v, const Arc& a) { return v < a.lo; });
  if (it != arcs_.begin()) {
    const Arc& a = *std::prev(it);
    if (t <= a.hi + kMemberTol && t >= a.lo - kMemberTol) return true;
  }
  // wrapping arc covers small t
  const Arc& last = arcs_.back();
  if (last.hi > 1.0 && t + 1.0 <= last.hi + kMemberTol) return true;
  return false;
}

ArcSet ArcSet::complement() const {
  if (arcs_.empty()) return full();
  Segs segs = cut_open(arcs_);
  std::vector<Arc> gaps;
  double prev = 0.0;
  for (const auto& [lo, hi] : segs) {
    if (lo > prev) gaps.push_back({prev, lo});
    prev = std::max(prev, hi);
  }
  if (prev < 1.0) gaps.push_back({prev, 1.0});

  // re-glue across 0: with segments present, a gap cannot cover everything
  if (gaps.size() >= 2 && gaps.front().lo == 0.0 && gaps.back().hi == 1.0) {
    Arc wrap{gaps.back().lo, gaps.front().hi + 1.0};
    gaps.erase(gaps.begin());
    gaps.back() = wrap;
  }
  return from_arcs(std::move(gaps));
}

ArcSet ArcSet::dilate(double r) const {
  if (r < 0.0 || !std::isfinite(r))
    throw std::invalid_argument("dilation radius must be >= 0");
  if (arcs_.empty()) return {};
  std::vector<Arc> grown;
  grown.reserve(arcs_.size());
  for (const Arc& a : arcs_) grown.push_back({a.lo - r, a.hi + r});
  return from_arcs(std::move(grown));
}

ArcSet ArcSet::rotate(double a) const {
  std::vector<Arc> moved;
  moved.reserve(arcs_.size());
  for (const Arc& x : arcs_) moved.push_back({x.lo + a, x.hi + a});
  return from_arcs(std::move(moved));
}

ArcSet ArcSet::unite(const ArcSet& A, const ArcSet& B) {
  std::vector<Arc> all = A.arcs_;
  all.insert(all.end(), B.arcs_.begin(), B.arcs_.end());
  return from_arcs(std::move(all));
}

ArcSet ArcSet::intersect(const ArcSet& A, const ArcSet& B) {
  if (A.empty() || B.empty()) return {};
  Segs sa = cut_open(A.arcs_);
  Segs sb = cut_open(B.arcs_);
  std::vector<Arc> hits;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    double lo = std::max(sa[i].first, sb[j].first);
    double hi = std::min(sa[i].second, sb[j].second);
    if (hi > lo) hits.push_back({lo, hi});
    if (sa[i].second < sb[j].second)
      ++i;
    else
      ++j;
  }
  return from_arcs(std::move(hits));
}

double ArcSet::point_at_fraction(double t) const {
  if (arcs_.empty()) throw std::invalid_argument("empty arc set");
  double total = measure();
  double target = mod1(t) * total;
  for (const Arc& a : arcs_) {
    if (target <= a.length()) return mod1(a.lo + target);
    target -= a.length();
  }
  return mod1(arcs_.back().hi);
}

std::string ArcSet::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  if (is_full()) {
    j.push_back({0.0, 1.0});
  } else {
    for (const Arc& a : arcs_) {
      double hi = a.hi > 1.0 ? a.hi - 1.0 : a.hi;
      j.push_back({a.lo, hi});
    }
  }
  return j.dump();
}

ArcSet ArcSet::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bad arc json: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("arc json must be an array of pairs");
  std::vector<Arc> raw;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw ConfigError("arc entries must be [lo, hi]");
    double lo = p[0].get<double>();
    double hi = p[1].get<double>();
    if (!(lo >= 0.0 && lo < 1.0 && hi >= 0.0 && hi <= 1.0))
      throw ConfigError("arc endpoints must lie in [0, 1]");
    if (hi == lo) continue;
    if (hi < lo) hi += 1.0;
    raw.push_back({lo, hi});
  }
  return from_arcs(std::move(raw));
}

}  // namespace rcmap
