#include "vort2d/rng.hpp"

#include <cmath>
#include <numbers>

namespace vort2d {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

inline double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t u = (static_cast<std::uint64_t>(a) << 32) | b;
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t ctr_hi,
                                               std::uint64_t ctr_lo) const {
    // Fold the stream id into the key so (seed, stream) pairs are
    // independent generators sharing one counter space.
    const std::uint64_t key = seed_ ^ (stream_ * 0x9E3779B97F4A7C15ull);
    return philox4x32_10({static_cast<std::uint32_t>(ctr_lo),
                          static_cast<std::uint32_t>(ctr_lo >> 32),
                          static_cast<std::uint32_t>(ctr_hi),
                          static_cast<std::uint32_t>(ctr_hi >> 32)},
                         static_cast<std::uint32_t>(key),
                         static_cast<std::uint32_t>(key >> 32));
}

std::array<double, 2> CounterRng::uniform_pair(std::uint64_t ctr_hi,
                                               std::uint64_t ctr_lo) const {
    const auto b = block(ctr_hi, ctr_lo);
    return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t ctr_hi,
                                              std::uint64_t ctr_lo) const {
    auto u = uniform_pair(ctr_hi, ctr_lo);
    if (u[0] <= 0.0) u[0] = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double phi = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace vort2d
