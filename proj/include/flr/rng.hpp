#pragma once

#include <cstdint>

namespace flr {

// PCG32 (XSH-RR output, 64-bit LCG state).
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) : inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  // Uniform in [0, 1).
  double next_double() { return (next_u32() >> 8) * (1.0 / 16777216.0); }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stateless per-(seed, pixel, sample) generator: results do not depend on
// which worker renders the pixel.
inline Pcg32 sample_rng(std::uint64_t seed, std::uint64_t pixel, std::uint64_t sample,
                        std::uint64_t stream = 0) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(pixel ^ splitmix64(sample ^ (stream << 48))));
  return Pcg32(key, splitmix64(key ^ stream));
}

}  // namespace flr
