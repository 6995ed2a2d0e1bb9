#ifndef HINV_RNG_HPP
#define HINV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hinv {

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Portable random source: std::mt19937_64 (output sequence fixed by the
/// standard) with hand-written conversions, since the standard distributions
/// differ between library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream `stream` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Stream ids of an annealing run. All three derive from the run seed.
inline constexpr std::uint64_t kInitialStream = 1;
inline constexpr std::uint64_t kProposalStream = 2;
inline constexpr std::uint64_t kAcceptanceStream = 3;
inline constexpr std::uint64_t kNoiseStream = 4;

}  // namespace hinv

#endif  // HINV_RNG_HPP
