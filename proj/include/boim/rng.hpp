#pragma once

#include <cstdint>
#include <limits>

namespace boim {

/// SplitMix64. One 64-bit word of state, so deriving an independent stream per
/// Monte-Carlo replicate costs nothing. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDULL;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ULL;
  z ^= z >> 33;
  return z;
}

/// Child seed as a pure function of the parent seed and a counter.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter) noexcept {
  return mix64(parent ^ mix64(counter + 0x632BE59BD9B4E019ULL));
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter, Rest... rest) noexcept {
  return derive_seed(derive_seed(parent, counter), static_cast<std::uint64_t>(rest)...);
}

/// Uniform on [0,1) with 53-bit resolution.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on the open interval (0,1).
inline double uniform_open01(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace boim
