#include "rcmap/noise.hpp"

#include <stdexcept>

namespace rcmap {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// 64-bit finalizer with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

KickStream::KickStream(const NoiseConfig& cfg, std::uint64_t stream_id) {
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 0.5))
    throw std::invalid_argument("epsilon must lie in [0, 1/2]");
  eps_ = cfg.epsilon;
  base_ = mix64(mix64(cfg.master_seed + kGamma) ^
                mix64(stream_id * 0xd1342543de82ef95ULL + 1));
}

double KickStream::unit_at(std::uint64_t pos) const {
  std::uint64_t w = mix64(base_ + kGamma * (pos + 1));
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

double KickStream::kick_at(std::uint64_t pos) const {
  return (2.0 * unit_at(pos) - 1.0) * eps_;
}

double KickStream::next_unit() { return unit_at(pos_++); }
double KickStream::next_kick() { return kick_at(pos_++); }

KickStream make_stream(const NoiseConfig& cfg, std::uint64_t stream_id) {
  return KickStream(cfg, stream_id);
}

}  // namespace rcmap
