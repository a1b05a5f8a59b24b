#ifndef POLARLAB_RNG_HPP
#define POLARLAB_RNG_HPP

#include <cstdint>

namespace polarlab {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// 64-bit finalizer from the splitmix64 generator (Vigna / Steele et al.);
/// a bijective mixing permutation.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// A per-trial random stream derived purely from (master seed, counter),
/// so any partitioning of trials across workers replays identical draws.
class CounterRng {
  public:
    CounterRng(std::uint64_t master_seed, std::uint64_t counter)
        : state_(mix64(master_seed ^ mix64(counter + kGolden))) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Fair bit.
    std::uint8_t next_bit() { return static_cast<std::uint8_t>(next_u64() >> 63); }

  private:
    std::uint64_t state_;
};

}  // namespace polarlab

#endif
