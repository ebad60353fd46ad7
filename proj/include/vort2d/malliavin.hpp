#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "vort2d/tangent.hpp"

namespace vort2d {

/// Ordered real Galerkin basis {ebar_k : 0 < |k| <= cutoff} (one direction
/// per lattice point; sin for k in Z+, cos otherwise), sorted by (|k|^2, k1, k2).
class GalerkinBasis {
  public:
    GalerkinBasis(const GridSpec& grid, int cutoff);

    int size() const { return static_cast<int>(modes_.size()); }
    int cutoff() const { return cutoff_; }
    const std::array<int, 2>& mode(int i) const { return modes_[i]; }

    /// Indices with |k| <= low_cutoff (the pi_l coordinate set).
    std::vector<int> low_indices(int low_cutoff) const;

    Eigen::VectorXd project(const VorticityState& w) const;
    VorticityState embed(const Eigen::VectorXd& x) const;

  private:
    GridSpec grid_;
    int cutoff_;
    std::vector<std::array<int, 2>> modes_;
};

/// Gram matrix of the discrete noise-to-state map over the path interval,
/// expressed on the Galerkin basis: M = A A^T with
/// (A v) = sum_m J_{s_m,t} dt phi1 Qtilde v_m (piecewise-constant controls).
/// Symmetric PSD by construction; Stokes case is diagonal on forced modes
/// with entries gamma^2 (1-e^{-2 a dt_int}) / (2a) + O(dt^2).
Eigen::MatrixXd assemble_matrix(const FrozenPath& path, const ForcingSpec& spec,
                                const GalerkinBasis& basis, int threads = 0);

struct ConeMinResult {
    double value = 0.0;
    double mu = 0.0;          // multiplier at the dual optimum
    Eigen::VectorXd minimizer;
    bool interior = false;    // unconstrained eigenvector already in the cone
};

/// inf of (M phi, phi)/||phi||^2 over the cone ||P phi|| >= alpha ||phi||,
/// P the coordinate projection onto low_indices. Computed exactly as
/// max_{mu >= 0} lambda_min(M - mu (P - alpha^2 I)) (S-procedure; the
/// function is concave in mu), with a sampled upper-bound cross-check.
/// Throws std::invalid_argument unless 0 < alpha < 1 or when M is not
/// symmetric PSD within tolerance.
ConeMinResult cone_min(const Eigen::MatrixXd& M,
                       const std::vector<int>& low_indices, double alpha);

// --- nondegeneracy survey -----------------------------------------------------

struct SurveyConfig {
    int samples = 50;
    double alpha = 0.1;
    int low_cutoff = 2;
    int galerkin_cutoff = 3;
    double interval = 1.0;      // Malliavin window t - s
    int quad_substeps = 100;    // integrator steps per window
    double burn_in = 0.0;       // base-path burn-in before the window
};

struct SurveySample {
    double cone_min = 0.0;
    double norm_w0 = 0.0;
};

struct SurveyResult {
    SurveyConfig config;
    std::vector<SurveySample> samples;
    double median = 0.0;
    double q10 = 0.0, q90 = 0.0;
    double tail_exponent = 0.0;  // log-log ecdf slope on the lower quartile
};

SurveyResult nondegeneracy_survey(const SimConfig& cfg, const SurveyConfig& scfg);

// --- alternating low-mode control ---------------------------------------------

struct ControlIntervalRecord {
    int n = 0;                 // interval index [n, n+1)
    double rho_norm = 0.0;     // ||rho(n+1)||
    double rho_low_norm = 0.0; // ||pi_l rho(n+1)||
    double control_energy = 0.0;
    double identity_residual = 0.0;  // even intervals only, else 0
};

struct ControlRun {
    double lambda = 0.0;  // Tikhonov shift of the regularized inverse
    int cutoff = 0;
    double interval_length = 1.0;
    double rho0_norm = 0.0;
    std::vector<ControlIntervalRecord> records;
};

/// Alternating control: even intervals apply v = A*(M+lambda)^{-1} J rho
/// realized through the controlled tangent sweep (so the Galerkin identity
/// pi_g rho(n+1) = lambda (M+lambda)^{-1} pi_g J rho(n) holds to roundoff),
/// odd intervals propagate freely.
ControlRun control_run(const SimConfig& cfg, const VorticityState& xi0,
                       double lambda, int cutoff, int n_intervals,
                       int substeps_per_interval = 100,
                       std::uint64_t noise_stream = 0);

}  // namespace vort2d
