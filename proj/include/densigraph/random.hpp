#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace densigraph {

using Seed = std::uint64_t;

/// Labels separating the independent random streams derived from one seed.
namespace streams {
inline constexpr std::uint64_t environment = 0x454e5649524f4e00ULL;
inline constexpr std::uint64_t dynamics = 0x44594e414d494300ULL;
inline constexpr std::uint64_t replica = 0x5245504c49434100ULL;
inline constexpr std::uint64_t trial = 0x545249414c000000ULL;
inline constexpr std::uint64_t mixture = 0x4d49585455524500ULL;
// Site draws use the upper 32 bits as label and the lower 32 as site index.
inline constexpr std::uint64_t site_draw = 0x53495445ULL << 32;
}  // namespace streams

struct Block {
  std::uint64_t lo;
  std::uint64_t hi;
};

/// Philox4x32-10 bijection (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// 128 random bits addressed by (seed, stream, counter).
Block keyed_block(Seed seed, std::uint64_t stream, std::uint64_t counter);

inline std::uint64_t keyed_word(Seed seed, std::uint64_t stream, std::uint64_t counter) {
  return keyed_block(seed, stream, counter).lo;
}

/// Maps the top 53 bits of a word onto [0, 1).
inline double to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

Seed derive_seed(Seed master, std::uint64_t label, std::uint64_t index);

/// Sequential view of one keyed stream; draw k is keyed_word(seed, stream, k).
/// Satisfies UniformRandomBitGenerator so it can feed <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(Seed seed, std::uint64_t stream, std::uint64_t start = 0)
      : seed_(seed), stream_(stream), counter_(start) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return keyed_word(seed_, stream_, counter_++); }
  double uniform() { return to_unit((*this)()); }
  bool bernoulli(double prob) { return uniform() < prob; }

  std::uint64_t position() const { return counter_; }
  void skip(std::uint64_t n) { counter_ += n; }

 private:
  Seed seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace densigraph
