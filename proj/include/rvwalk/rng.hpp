#pragma once

#include <cstdint>

namespace rvwalk {

// Finalizer from the splitmix64 generator (Steele/Lea/Flood; Vigna's fixed-increment
// variant). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
    return mix64(z);
  }

  // Uniform on the open interval (0,1); never returns an exact endpoint.
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Derive a decorrelated seed from (seed, tag). Pure function of its inputs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed + UINT64_C(0x9E3779B97F4A7C15) * (tag + 1));
}

// Substream j of a master seed. Independent streams for parallel replication:
// the stream is a pure function of (master, j), so any assignment of indices to
// workers reproduces the serial result.
inline SplitMix64 substream(std::uint64_t master, std::uint64_t index) {
  return SplitMix64(derive_seed(master, index));
}

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

}  // namespace rvwalk
