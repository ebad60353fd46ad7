#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vort2d/integrator.hpp"

namespace vort2d {

/// Frozen base trajectory over one interval at full substep resolution:
/// cached physical-space velocity (u, v) of the state each substep acts on,
/// endpoint states, and the noise record. The tangent/adjoint sweeps below
/// are the exact Jacobian (and its transpose) of the integrator steps that
/// produced it.
struct FrozenPath {
    SimConfig cfg;
    double dt = 0.0;
    double t_start = 0.0;
    int n_steps = 0;
    std::vector<std::vector<double>> u_phys, v_phys;  // empty in Stokes runs
    std::vector<VorticityState> noise;                // optional record
    VorticityState w_begin, w_end;

    double t_end() const { return t_start + dt * n_steps; }
};

/// Integrates n_steps of size dt from w0 and caches what the tangent needs.
FrozenPath freeze_path(const SimConfig& cfg, const VorticityState& w0,
                       NoiseSource& noise, int n_steps, double dt,
                       bool store_noise = false);

/// Piecewise-constant control: one value per forced direction per substep,
/// in the L2([s,t]) pairing with weight dt.
struct ControlSignal {
    const ForcingSpec* spec = nullptr;
    std::vector<std::vector<double>> values;  // [step][direction]
    double sign = 1.0;

    double energy(double dt) const;
};

/// Linearized-step machinery for one (cfg, dt) pair. The forward step is
///   xi <- E xi + dt phi1 DN(xi) + dt phi1 Qtilde v,
/// the exact derivative of Stepper::step around the frozen state, with the
/// control injected through the same integrating-factor weight; Qtilde maps
/// direction j to gamma_j * ebar_{k_j} (unit-normalized basis fields).
/// The adjoint step is its exact transpose in the L2 pairing.
class TangentOps {
  public:
    TangentOps(const SimConfig& cfg, double dt);

    double dt() const { return dt_; }

    void forward_step(const FrozenPath& path, int step, VorticityState& xi,
                      const ControlSignal* control = nullptr) const;
    void adjoint_step(const FrozenPath& path, int step, VorticityState& eta) const;

    /// J_{s,t} xi (optionally controlled): steps [first, last) of the path.
    VorticityState forward_sweep(const FrozenPath& path, VorticityState xi,
                                 const ControlSignal* control = nullptr,
                                 int first = 0, int last = -1) const;
    /// Exact transpose J*_{s,t} eta over steps [first, last) applied in reverse.
    VorticityState adjoint_sweep(const FrozenPath& path, VorticityState eta,
                                 int first = 0, int last = -1) const;

    /// Adjoint sweep that also records, per substep m and forced direction j,
    ///   r_m[j] = gamma_j phi1_j <ebar_j, (transpose propagator to t) eta>,
    /// i.e. the discrete (A* eta)(s_m). Used for Malliavin assembly and the
    /// low-mode control.
    std::vector<std::vector<double>> adjoint_record(const FrozenPath& path,
                                                    const ForcingSpec& spec,
                                                    VorticityState eta) const;

  private:
    SimConfig cfg_;
    double dt_;
    std::vector<double> decay_;
    std::vector<double> phi_dt_;

    void bilinear(const FrozenPath& path, int step, const VorticityState& in,
                  VorticityState& out) const;
    void bilinear_adjoint(const FrozenPath& path, int step,
                          const VorticityState& in, VorticityState& out) const;
};

// --- helpers shared with the Malliavin module -------------------------------

/// <ebar_k, w> for the unit basis field of lattice point k.
double basis_project(const VorticityState& w, int k1, int k2);
/// w += amount * ebar_k.
void basis_inject(VorticityState& w, int k1, int k2, double amount);

// --- high-mode contraction experiment ----------------------------------------

struct ContractionSample {
    double norm_out = 0.0;  // ||(1-pi_l) J_{0,T}||
    double norm_in = 0.0;   // ||J_{0,T} (1-pi_l)||
    bool converged = true;
    int iterations = 0;
};

struct ContractionStat {
    int cutoff = 0;
    double T = 0.0;
    double p = 1.0;
    std::vector<ContractionSample> samples;
    double mean_out = 0.0, ci_lo_out = 0.0, ci_hi_out = 0.0;
    double mean_in = 0.0, ci_lo_in = 0.0, ci_hi_in = 0.0;
    double diagonal_prediction = 0.0;  // exp(-(nu m*^2 + tau) T), Stokes value
};

/// Monte Carlo estimate of E||(1-pi_l)J_{0,T}||^p and E||J_{0,T}(1-pi_l)||^p
/// over noise realizations started from w0; operator norms by power iteration
/// on the frozen path using the forward/adjoint sweeps. rayleigh_tol is the
/// relative plateau tolerance of the Rayleigh estimate; with nearly
/// degenerate top shells (weak nonlinearity) the estimate plateaus at that
/// accuracy long before the iterate settles, so samples whose cap is hit are
/// flagged, not fatal.
ContractionStat contraction_stat(const SimConfig& cfg, const VorticityState& w0,
                                 int cutoff, double T, double p, int samples,
                                 std::uint64_t seed_offset = 1000,
                                 double rayleigh_tol = 1e-9);

/// Smallest damping rate among retained modes with |m| > cutoff.
double min_damping_above(const SimConfig& cfg, int cutoff);

}  // namespace vort2d
