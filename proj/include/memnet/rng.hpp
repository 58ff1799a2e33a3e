#pragma once

#include <cstdint>
#include <random>

namespace memnet {

/// Seedable Gaussian generator with a platform-independent output stream:
/// std::mt19937_64 (fully specified by the standard) feeding a Marsaglia
/// polar transform implemented here, since std::normal_distribution is
/// implementation-defined.
class Rng {
 public:
  static constexpr const char* algorithm = "mt19937_64+marsaglia-polar";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for replicate `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal();

  std::uint64_t next_u64() { return engine_(); }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace memnet
