#pragma once

#include <cstdint>
#include <random>

namespace qkt {

/// splitmix64 step; used for seed mixing only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic per-task seed: hash of (master seed, task index).
/// Every parallel sweep cell derives its own generator from this, so results
/// do not depend on scheduling order or worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= task + 0x632be59bd9b4e019ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

/// Seeded generator with a portable uniform-double mapping.
/// std::uniform_real_distribution is implementation-defined, so doubles are
/// produced from the raw 64-bit stream directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qkt
