#pragma once

#include <stdexcept>

namespace rcmap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A root of psi' sits where |psi''| is below the nondegeneracy floor.
struct DegenerateCritical : Error { using Error::Error; };

// Doubling the scan resolution changed the root count.
struct ScanTooCoarse : Error { using Error::Error; };

// A fold of tau fails the curvature floor, so branch bracketing is ambiguous.
struct TangentRoot : Error { using Error::Error; };

struct EpsilonZero : Error { using Error::Error; };

// Noise width below cell resolution: eps * n_cells < 4.
struct KernelUnderresolved : Error { using Error::Error; };

// A sublevel set does not split into one component per critical point.
struct ComponentMerge : Error { using Error::Error; };

// Certificate arithmetic failed; the forcing amplitude is too small.
struct TrapViolation : Error { using Error::Error; };

// A certified orbit left its trapping ball.
struct TrapEscape : Error { using Error::Error; };

struct EmptyAtlas : Error { using Error::Error; };

struct ConfigError : Error { using Error::Error; };

}  // namespace rcmap
