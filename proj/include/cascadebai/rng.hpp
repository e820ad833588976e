#pragma once

#include <cstdint>
#include <limits>

namespace cascadebai {

/// SplitMix64 finalizer; also used to derive stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small counter-based generator. Each instance is an independent stream
/// fully determined by its seed, so trials can run on any worker in any
/// order and still reproduce bit-identical draws.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

private:
  std::uint64_t state_;
};

/// Identifies one trial's random stream as a pure function of
/// (master_seed, trial_index).
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  std::uint64_t stream_seed() const {
    return mix64(mix64(master_seed) ^ (trial_index * 0xd1342543de82ef95ULL + 1));
  }

  SplitMix64 make_stream() const { return SplitMix64(stream_seed()); }
};

} // namespace cascadebai
