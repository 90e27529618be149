#pragma once

#include <cstddef>
#include <vector>

#include "rcmap/arcset.hpp"
#include "rcmap/psi.hpp"

namespace rcmap {

// One map tau_a(x) = a + x + L * psi(x) mod 1. The profile travels by value;
// it is small and immutable. a lies in [0, 1). L = 0 is admitted as the rigid
// rotation limit even though production parameters keep L > 0.
struct MapParams {
  double a = 0.0;
  double L = 0.0;
  PsiSpec psi;
};

MapParams make_params(double a, double L, PsiSpec psi);

double eval_tau(const MapParams& p, double x);
double eval_tau_prime(const MapParams& p, double x);

// The lift a + x + L psi(x) without reduction; continuous, ascends by 1 per
// period.
double tau_lift(const MapParams& p, double x);

// Optional override for scan-based root location inside this module. points
// == 0 picks max(4096, 512 * K) with K the top harmonic index; root scans
// run on psi' level sets, so the density never depends on L.
struct ScanOptions {
  std::size_t points = 0;
  double root_tol = 1e-12;
  bool verify = true;
};

// {x : |tau'(x)| <= K}, independent of a. Requires K >= 1; the set is a
// union of closed arcs, one around each critical point of psi once L is
// large enough for them to separate.
ArcSet compute_I_K(const MapParams& p, double K, const ScanOptions& opt = {});

double largest_component_length(const ArcSet& s);

// Folds: roots of tau' on [0, 1), ascending. Each fold must pass the
// curvature floor or TangentRoot is raised.
std::vector<double> tau_critical_points(const MapParams& p,
                                        const ScanOptions& opt = {});

// B_r(tau_a(A)): exact image through the lift on fold-free pieces, then a
// closed r-dilation. Pieces whose lift spans >= 1 short-circuit to the full
// circle.
ArcSet image_arcset(const MapParams& p, const ArcSet& A, double r,
                    const ScanOptions& opt = {});
ArcSet image_arcset(const MapParams& p, const ArcSet& A, double r,
                    const std::vector<double>& folds);

// tau_a^{-1} of a single closed arc, as a union of one arc per crossing
// branch.
ArcSet preimage_arc(const MapParams& p, const Arc& target,
                    const ScanOptions& opt = {});

namespace detail_map {
// Sublevel set without the K >= 1 gate; used internally for bands like
// |tau'| <= 0.1.
ArcSet sublevel_set(const MapParams& p, double K, const ScanOptions& opt);
}  // namespace detail_map

}  // namespace rcmap
