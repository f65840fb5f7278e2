#pragma once
// Deterministic pseudo-random number generation.
//
// Every randomized routine in this library draws from an explicitly seeded
// generator so that results are reproducible bit-for-bit across runs,
// platforms and thread counts.  Independent logical streams (one per
// student, per rollout, per dataset, ...) are derived from a root seed and
// a list of integer tags via splitmix64 mixing, so parallel workers never
// share generator state.

#include <array>
#include <cstdint>
#include <initializer_list>

namespace cedu {

// splitmix64 step: advances *state and returns the next mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d9e8a27cb787e5ull;
  return z ^ (z >> 31);
}

// xoshiro256++ generator with splitmix64-based seeding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  // Derives an independent stream from (seed, tags...).  Different tag
  // sequences give statistically independent generators; the same sequence
  // always gives the same generator.
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return Rng(derive_seed(seed, tags));
  }

  // The seed such a stream is built from (useful for nesting).
  static std::uint64_t derive_seed(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = seed;
    for (std::uint64_t tag : tags) {
      s = splitmix64(s) ^ (tag * 0x9e3779b97f4a7c15ull);
    }
    return s;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).  Requires n > 0.
  int uniform_int(int n) { return static_cast<int>(uniform() * static_cast<double>(n)); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

// Tags used to label derived streams.  Centralised so that independent
// modules never collide on the same tag value.
namespace stream_tag {
inline constexpr std::uint64_t kGraph = 0x67726170ull;    // graph topology
inline constexpr std::uint64_t kStudent = 0x73747564ull;  // per-student simulation
inline constexpr std::uint64_t kQuery = 0x71756572ull;    // query generation
inline constexpr std::uint64_t kRollout = 0x726f6c6cull;  // Monte-Carlo rollouts
inline constexpr std::uint64_t kPolicy = 0x706f6c69ull;   // rollout action policy
inline constexpr std::uint64_t kDataset = 0x64617461ull;  // per-dataset config seeds
}  // namespace stream_tag

}  // namespace cedu
