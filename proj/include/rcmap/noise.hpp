#pragma once

#include <cstdint>

namespace rcmap {

struct NoiseConfig {
  double epsilon = 0.0;         // kick half-width, in [0, 1/2]
  std::uint64_t master_seed = 0;
};

// Kick sequence for one (seed, stream) pair. Counter-based: the word at
// position n is a hash of (seed, stream, n), so streams never share state,
// skipping is O(1), and replay is exact regardless of who else drew what.
class KickStream {
 public:
  KickStream(const NoiseConfig& cfg, std::uint64_t stream_id);

  // uniform on [-eps, eps]; advances the counter
  double next_kick();
  // uniform on [0, 1) with 53 random bits; advances the counter
  double next_unit();

  double unit_at(std::uint64_t pos) const;
  double kick_at(std::uint64_t pos) const;

  std::uint64_t position() const { return pos_; }
  double epsilon() const { return eps_; }

 private:
  double eps_;
  std::uint64_t base_;
  std::uint64_t pos_ = 0;
};

KickStream make_stream(const NoiseConfig& cfg, std::uint64_t stream_id);

}  // namespace rcmap
