#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vort2d/forcing.hpp"
#include "vort2d/grid_spectral.hpp"

namespace vort2d {

struct SimConfig {
    GridSpec grid;
    double nu = 0.1;   // viscosity, > 0
    double tau = 0.0;  // Ekman friction, >= 0
    double dt = 0.0;   // step size; 0 requests the CFL estimate
    double t_end = 1.0;
    ForcingSpec forcing;
    std::uint64_t seed = 0;
    int output_every = 1;       // records every this many steps
    bool nonlinearity = true;   // false gives the Stokes/OU system
    double cfl = 0.2;           // advective CFL number for auto dt

    void validate() const;
    /// dt, or the CFL estimate from w0 and the forcing when dt == 0.
    double resolve_dt(const VorticityState& w0) const;
    /// Damping rate nu |m/scale|^2 + tau of mode m.
    double damping(int m1, int m2) const {
        const double kk = (double(m1) * m1 + double(m2) * m2) /
                          (grid.scale * grid.scale);
        return nu * kk + tau;
    }
};

struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-step noise increments addressed by step index.
class NoiseSource {
  public:
    virtual ~NoiseSource() = default;
    virtual VorticityState increment(std::uint64_t step) = 0;
};

/// The physical forcing: sample_increment with stream id = trajectory id.
class PhiloxNoise : public NoiseSource {
  public:
    PhiloxNoise(const ForcingSpec& spec, const GridSpec& grid, double dt,
                std::uint64_t seed, std::uint64_t trajectory)
        : spec_(spec), grid_(grid), dt_(dt), rng_(seed, trajectory) {}
    VorticityState increment(std::uint64_t step) override {
        return sample_increment(spec_, grid_, dt_, rng_, step);
    }

  private:
    ForcingSpec spec_;
    GridSpec grid_;
    double dt_;
    CounterRng rng_;
};

class ZeroNoise : public NoiseSource {
  public:
    explicit ZeroNoise(const GridSpec& grid) : grid_(grid) {}
    VorticityState increment(std::uint64_t) override {
        return VorticityState(grid_);
    }

  private:
    GridSpec grid_;
};

/// Exponential (integrating factor) Euler-Maruyama stepper. Per mode
///   w <- e^{-a dt} w + dt phi1(-a dt) N(w) + e^{-a dt} incr,
/// a = nu |k|^2 + tau, N the dealiased nonlinear tendency.
class Stepper {
  public:
    Stepper(const SimConfig& cfg, double dt);

    double dt() const { return dt_; }
    const std::vector<double>& decay() const { return decay_; }
    const std::vector<double>& tendency_weight() const { return phi_dt_; }

    /// Advances w by one step in place. Throws BlowUpError on non-finite
    /// coefficients.
    void step(VorticityState& w, const VorticityState& increment) const;
    void step(VorticityState& w) const;  // zero noise

  private:
    SimConfig cfg_;
    double dt_;
    std::vector<double> decay_;   // e^{-a dt} per lattice site
    std::vector<double> phi_dt_;  // dt * phi1(-a dt) per lattice site
};

/// One step with a throwaway Stepper (tests / bindings convenience).
VorticityState step(const VorticityState& w, const SimConfig& cfg,
                    const VorticityState& increment);

struct ObsRecord {
    double t = 0.0;
    double enstrophy = 0.0;  // (1/2)||w||^2
    double energy = 0.0;     // (1/2)||u||^2
    double h1_sq = 0.0;      // ||grad w||^2
    double noise_qv = 0.0;   // accumulated sum ||increment||^2
    double h1_int = 0.0;     // trapezoidal integral of h1_sq over [0,t]
};

struct Trajectory {
    std::vector<ObsRecord> records;
    VorticityState final_state;
};

/// Observer called at every record cadence (after recording).
using StateObserver = std::function<void(const VorticityState&, std::uint64_t step)>;

Trajectory simulate(const SimConfig& cfg, const VorticityState& w0,
                    NoiseSource& noise, const StateObserver& observer = {});
/// Default run: Philox noise for the given trajectory id, w0 = 0 when absent.
Trajectory simulate(const SimConfig& cfg,
                    std::optional<VorticityState> w0 = std::nullopt,
                    std::uint64_t trajectory = 0,
                    const StateObserver& observer = {});

/// Independent-trajectory ensemble (streams split by member id); members run
/// in parallel but results are aggregated in member order.
std::vector<Trajectory> run_ensemble(const SimConfig& cfg,
                                     const VorticityState& w0, int members,
                                     int threads = 0);

// --- snapshot files ----------------------------------------------------------
// Little-endian binary: magic "VORT", u32 version=1, u32 n, f64 scale,
// f64 time, then n*n complex pairs (f64 re, f64 im) in row-major order;
// entry i1*n+i2 is mode (m1, m2) with m = index <= n/2 ? index : index - n,
// the i1 axis being the x1 frequency.

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void checkpoint_save(const VorticityState& w, const std::string& path);
VorticityState checkpoint_load(const std::string& path);

}  // namespace vort2d
