#pragma once

#include <array>
#include <cstdint>

namespace vort2d {

/// Philox4x32-10 keyed by (seed, stream). Every draw is addressed by a
/// 96-bit counter (ctr_hi, ctr_lo), so values are pure functions of
/// (seed, stream, ctr_hi, ctr_lo): trajectories, steps and noise modes get
/// independent, reproducible values with no shared state.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Raw 128-bit block for the given counter.
    std::array<std::uint32_t, 4> block(std::uint64_t ctr_hi,
                                       std::uint64_t ctr_lo) const;

    /// Two independent uniforms in [0,1) with 53-bit resolution.
    std::array<double, 2> uniform_pair(std::uint64_t ctr_hi,
                                       std::uint64_t ctr_lo) const;

    /// Two independent standard normals (Box-Muller).
    std::array<double, 2> normal_pair(std::uint64_t ctr_hi,
                                      std::uint64_t ctr_lo) const;

    double normal(std::uint64_t ctr_hi, std::uint64_t ctr_lo) const {
        return normal_pair(ctr_hi, ctr_lo)[0];
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace vort2d
