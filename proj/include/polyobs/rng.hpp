#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace polyobs {

// Identifier recorded in trajectory metadata so runs can be reproduced.
// The uniform mapping is spelled out here (not delegated to
// std::uniform_real_distribution, whose output is implementation-defined)
// so that identical seeds give identical bytes on every platform.
inline constexpr const char* kPrngId = "mt19937_64/u53-v1";

// splitmix64 step, used to derive per-signal sub-seeds from (seed, tag).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a, used to tag sub-streams by signal name.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace polyobs
