#ifndef PRIMECF_RNG_HPP_
#define PRIMECF_RNG_HPP_

#include <cstdint>

namespace primecf::rng {

// SplitMix64 (Vigna). Small state, full-period, passes BigCrush; every
// stream is a pure function of its 64-bit seed, which is what the
// reproducibility contract needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): never returns 0 or 1, so callers
  // may divide or take logarithms without guards.
  double uniform_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Stateless avalanche mix (the SplitMix64 output function). Bijective on
// 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based derivation of per-trajectory seeds. For a fixed master
// seed the map index -> seed is injective: index * ODD is injective mod
// 2^64 and mix64 is a bijection. Fixed algorithm, identical on every
// platform.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
  return mix64(master_seed + 0x9E3779B97F4A7C15ULL +
               trajectory_index * 0xD1B54A32D192ED03ULL);
}

// MSB-first bit stream over SplitMix64 words; the bit source for the
// lazy exact-real backend and its cross-validation harness.
class BitStream {
 public:
  explicit BitStream(std::uint64_t seed) : gen_(seed) {}

  // true = 1 bit.
  bool next_bit() {
    if (avail_ == 0) {
      word_ = gen_.next_u64();
      avail_ = 64;
    }
    --avail_;
    ++consumed_;
    return (word_ >> avail_) & 1u;
  }

  std::uint64_t bits_consumed() const { return consumed_; }

 private:
  SplitMix64 gen_;
  std::uint64_t word_ = 0;
  unsigned avail_ = 0;
  std::uint64_t consumed_ = 0;
};

}  // namespace primecf::rng

#endif  // PRIMECF_RNG_HPP_
