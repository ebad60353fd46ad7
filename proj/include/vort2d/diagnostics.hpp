#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vort2d/integrator.hpp"

namespace vort2d {

// --- stationary balances ------------------------------------------------------

/// Per-unit-area stationary budgets. With the forcing convention used here
/// (eps, eps' are the Ito rates of d||w||^2 and d||u||^2 at scale 1) the
/// stationary identities are
///   (nu <||grad w||^2> + tau <||w||^2>) / area = eps  / (8 pi^2)
///   (nu <||w||^2>      + tau <||u||^2>) / area = eps' scale^2 / (8 pi^2).
struct BalanceReport {
    // enstrophy budget (per unit area)
    double visc_enstrophy = 0.0;   // nu <||grad w||^2>/area
    double fric_enstrophy = 0.0;   // tau <||w||^2>/area
    double target_enstrophy = 0.0; // eps/(8 pi^2)
    double residual_enstrophy = 0.0;
    double ci_enstrophy = 0.0;
    // energy budget (per unit area)
    double visc_energy = 0.0;      // nu <||w||^2>/area  (||grad u|| = ||w||)
    double fric_energy = 0.0;      // tau <||u||^2>/area
    double target_energy = 0.0;    // eps' scale^2/(8 pi^2)
    double residual_energy = 0.0;
    double ci_energy = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t n_records = 0;
};

/// Default burn-in 5/(nu/scale^2 + tau).
double default_burn_in(const SimConfig& cfg);

/// Time/ensemble averages over records with t >= burn_in; CI by batch means
/// over the given number of batches. Throws std::invalid_argument when the
/// window past burn-in is empty.
BalanceReport balance_report(const std::vector<Trajectory>& ensemble,
                             const SimConfig& cfg, double burn_in,
                             int batches = 10);

// --- a-priori moment bounds -----------------------------------------------------

struct MomentBoundReport {
    bool l2_bound_ok = true;      // E||w(t)||^2 <= e^{-2 nu t}||w0||^2 + eps/nu + 3 sigma
    double worst_l2_margin = 0.0; // min over t of (bound - estimate)/bound
    bool exp_bound_ok = true;     // E e^{eta ||w||^2} <= 2 e^{eta e^{-nu t}||w0||^2} + 3 sigma
    double worst_exp_margin = 0.0;
    bool h1_int_bound_ok = true;  // E e^{eta nu int ||grad w||^2} <= 2 e^{eta eps t + eta ||w0||^2} + 3 sigma
    double worst_h1_margin = 0.0;
    std::vector<double> eta_values;
};

/// Checks the a-priori bounds on an ensemble with common initial state.
/// eta_fractions are multiples of nu/eps (validity range of the exponential
/// bounds); empty selects {0.25, 0.5, 1.0}.
MomentBoundReport moment_bound_check(const std::vector<Trajectory>& ensemble,
                                     const SimConfig& cfg, double w0_norm_sq,
                                     std::vector<double> eta_fractions = {});

// --- energy spectrum ------------------------------------------------------------

/// Shell-averaged spectrum on unit-width shells centered at integer |m|
/// (kappa = |m|/scale). e integrates to the mean energy density exactly;
/// z is the matching enstrophy shell density (exact enstrophy sum rule).
struct SpectrumSeries {
    std::vector<double> kappa;
    std::vector<double> e;
    std::vector<double> z;
    std::size_t n_states = 0;

    double energy_density() const;    // sum e dkappa
    double enstrophy_density() const; // sum z dkappa
};

SpectrumSeries energy_spectrum(const VorticityState& w);

/// Online accumulator for window averages.
class SpectrumAccumulator {
  public:
    void add(const VorticityState& w);
    SpectrumSeries series() const;

  private:
    SpectrumSeries sum_;
};

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double kappa_nu = 0.0;   // nu^{-1/2} eps^{1/6}
    double kappa_tau = 0.0;  // tau^{3/2} eps'^{-1/2}
    int n_shells = 0;
};

/// Least-squares line on log e vs log kappa over [kappa_lo, kappa_hi].
/// Throws std::invalid_argument with fewer than 5 positive shells in range.
SlopeFit slope_fit(const SpectrumSeries& spec, double kappa_lo, double kappa_hi,
                   const SimConfig& cfg);

// --- shared-noise coupling -------------------------------------------------------

struct CouplingRecord {
    double t = 0.0;
    double dist = 0.0;
    double dist_low = 0.0;
    double dist_high = 0.0;
};

/// Integrates two copies under identical noise; reports the L2 distance and
/// its low/high split at the given cutoff.
std::vector<CouplingRecord> coupling_distance(const SimConfig& cfg,
                                              const VorticityState& w0_a,
                                              const VorticityState& w0_b,
                                              double T, int cutoff);

}  // namespace vort2d
