#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vort2d/grid_spectral.hpp"
#include "vort2d/rng.hpp"

namespace vort2d {

struct ForcingMode {
    int k1 = 0;
    int k2 = 0;
    double gamma = 0.0;
    bool operator==(const ForcingMode&) const = default;
};

/// Validated stochastic forcing: a finite, reflection-closed set K of
/// wavenumbers with amplitudes gamma_k, one unit-speed Brownian motion per
/// real direction e_k (sin for k in Z+, cos otherwise).
struct ForcingSpec {
    std::vector<ForcingMode> modes;
    // Derived (scale-1 torus conventions):
    //   eps  = 2 pi^2 sum gamma^2        -- Ito rate of d||w||^2
    //   eps' = 2 pi^2 sum gamma^2/|k|^2  -- Ito rate of d||u||^2
    double eps = 0.0;
    double eps_prime = 0.0;
    double kappa_f = 0.0;      // max |k| over K
    double kappa_f_rms = 0.0;  // sqrt(sum gamma^2 |k|^2 / sum gamma^2)

    int dim() const { return static_cast<int>(modes.size()); }
};

/// Validates the raw mode list and fills the derived quantities.
/// When auto_reflect is set, missing reflection partners are added with the
/// same amplitude before validation. Throws std::invalid_argument on a zero
/// mode, duplicate mode, nonpositive amplitude or missing partner.
ForcingSpec validate_forcing(std::vector<ForcingMode> raw,
                             bool auto_reflect = false);

struct HormanderReport {
    bool cond_a = false;  // K invariant under k -> -k
    bool cond_b = false;  // two elements of unequal length
    bool cond_c = false;  // K generates Z^2 over the integers
    std::vector<std::array<int, 2>> missing_reflections;
    std::optional<std::array<std::array<int, 2>, 2>> unequal_pair;
    // Column-reduced lattice normal form of the 2 x |K| mode matrix
    // (lower triangular, diagonal = invariant factors d1, d1*d2).
    std::array<std::array<long long, 2>, 2> normal_form{{{0, 0}, {0, 0}}};

    bool pass() const { return cond_a && cond_b && cond_c; }
    std::string describe() const;
};

/// Checks the three sufficient conditions for the Hoermander bracket
/// condition on the forced set K. Pure set function of K.
HormanderReport hormander_check(const std::vector<std::array<int, 2>>& K);
HormanderReport hormander_check(const ForcingSpec& spec);

/// One Euler-Maruyama noise increment sum_k gamma_k dB_k e_k with
/// dB_k ~ N(0, dt), addressed by (rng stream, step index, mode index):
/// bitwise reproducible.
VorticityState sample_increment(const ForcingSpec& spec, const GridSpec& grid,
                                double dt, const CounterRng& rng,
                                std::uint64_t step_index);

}  // namespace vort2d
