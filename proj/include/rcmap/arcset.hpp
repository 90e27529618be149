#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rcmap {

struct Arc {
  double lo;  // in [0, 1)
  double hi;  // in (lo, lo + 1]; hi > 1 means the arc wraps through 0
  double length() const { return hi - lo; }
};

// Finite union of closed arcs on the circle R/Z.
//
// Stored normalized: arcs sorted by lo, pairwise disjoint, and glued, so a
// component crossing 0 appears once as a wrapping arc (necessarily the last).
// Arcs shorter than 1e-14 are dropped and gaps up to 1e-14 are closed during
// normalization; a single component of length >= 1 - 1e-12 snaps to the full
// circle. Serialization is a JSON array of [lo, hi] pairs with endpoints in
// [0, 1); a pair with hi < lo denotes a wrapping arc and [0, 1] denotes the
// full circle.
class ArcSet {
 public:
  ArcSet() = default;  // empty set
  static ArcSet full();
  static ArcSet arc(double lo, double hi);  // hi in (lo, lo + 1]
  static ArcSet from_arcs(std::vector<Arc> raw);

  bool empty() const { return arcs_.empty(); }
  bool is_full() const;
  std::size_t size() const { return arcs_.size(); }
  const std::vector<Arc>& arcs() const { return arcs_; }

  double measure() const;
  double largest_component() const;
  bool contains(double x) const;

  ArcSet complement() const;
  ArcSet dilate(double r) const;   // closed r-neighborhood
  ArcSet rotate(double a) const;   // pointwise + a mod 1

  static ArcSet unite(const ArcSet& A, const ArcSet& B);
  static ArcSet intersect(const ArcSet& A, const ArcSet& B);

  // Arc-length parameterization: the point at fraction t in [0, 1) of the
  // total measure, walking arcs in stored order. Empty set is an error.
  double point_at_fraction(double t) const;

  std::string to_json() const;
  static ArcSet from_json(const std::string& text);

 private:
  std::vector<Arc> arcs_;
};

}  // namespace rcmap
