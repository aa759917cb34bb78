#ifndef HVT_RNG_HPP
#define HVT_RNG_HPP

#include <cstdint>

namespace hvt {

/// SplitMix64. Fixed, documented generator so that seeded runs are
/// byte-identical across platforms and thread counts (std distributions
/// are not portable). Stream j of a base seed is seeded with
/// mix64(base + (j+1) * GOLDEN), which makes per-trial streams independent
/// of sampling order.
class SplitMix64 {
  public:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix64(std::uint64_t x) {
        x += GOLDEN;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    static std::uint64_t stream_seed(std::uint64_t base, std::uint64_t j) {
        return mix64(base + (j + 1) * GOLDEN);
    }

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += GOLDEN;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
    }

  private:
    std::uint64_t state_;
};

}  // namespace hvt

#endif
