#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flost {

/// splitmix64 step, used to derive independent stream seeds from one seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. The bit source is mt19937_64, whose output
/// sequence is fixed by the standard, and the uniform/normal mappings are
/// implemented here rather than through std distributions, so a given
/// (seed, stream) pair produces bit-identical draws on any conforming
/// standard library.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (stream + 1);
    gen_.seed(splitmix64(s));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in the open interval (0,1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; pairs are consumed eagerly so the
  /// stream position depends only on the number of calls.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, bound) by rejection, bias-free.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flost
