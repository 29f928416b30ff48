#pragma once

#include <cstdint>

namespace contraprost::stats {

// SplitMix64 (Steele, Lea & Flood 2014). Output depends only on the seed, so
// draws are bit-identical on every platform, unlike std:: distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t x = next();
      if (x >= limit) return x % bound;
    }
  }

  // Independent generator for sub-stream `index`.
  SplitMix64 split(std::uint64_t index) const {
    SplitMix64 mix(state_ ^ (index * 0xD1B54A32D192ED03ULL));
    return SplitMix64(mix.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace contraprost::stats
