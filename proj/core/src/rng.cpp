#include "kmrate/rng.hpp"

#include <array>
#include <stdexcept>

namespace kmrate {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream{seed, splitmix64(stream_id ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

RngEngine::RngEngine(const RngStream& stream) {
  // std::seed_seq's mixing algorithm is fixed by the standard, so the state is
  // reproducible across standard libraries.
  const std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32),
      static_cast<std::uint32_t>(stream.stream_id), static_cast<std::uint32_t>(stream.stream_id >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t RngEngine::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("RngEngine::below: bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

}  // namespace kmrate
