#pragma once

#include <cstdint>

namespace mop {

// SplitMix64 finalizer; used to derive independent stream seeds from
// (master seed, run, stream) coordinates.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xorshift64* generator: 64-bit shift-register core with a multiplicative
// output scramble.  State must be nonzero; seeding goes through splitmix64
// so any user seed (including 0) is acceptable.
class xorshift64star {
 public:
  explicit xorshift64star(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, 1) with 53 random bits (exactly representable doubles).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [1, 2): 1 + next_unit(), still exactly representable.
  double next_weight() { return 1.0 + next_unit(); }

  // Uniform in [-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

 private:
  std::uint64_t state_;
};

// Deterministic seed for a (run, stream) cell of an experiment; the chain of
// two finalizers keeps distinct coordinates statistically independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                                 std::uint64_t stream) {
  std::uint64_t x = splitmix64(master + 0x9E3779B97F4A7C15ULL * (run + 1));
  return splitmix64(x ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
}

}  // namespace mop
