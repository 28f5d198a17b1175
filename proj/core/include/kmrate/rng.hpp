#pragma once

#include <cstdint>
#include <random>

namespace kmrate {

/// Deterministic random source. Identical (seed, stream_id) pairs reproduce
/// identical draws on every platform; distinct stream ids seed unrelated
/// generator states.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream for shard `index`, distinct from this stream and its siblings.
  RngStream substream(std::uint64_t index) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Generator bound to one RngStream. Conversions to uniform doubles are done
/// here rather than through <random> distributions, whose output is
/// implementation-defined.
class RngEngine {
 public:
  explicit RngEngine(const RngStream& stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// True with probability p; exact at p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace kmrate
