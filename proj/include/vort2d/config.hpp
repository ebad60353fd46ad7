#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vort2d/integrator.hpp"

namespace vort2d {

extern const char* kVersion;

/// Full experiment configuration: flat dotted keys, one option per key.
/// Unknown keys are rejected with the offending key named.
struct RunConfig {
    // grid.*
    int grid_n = 64;
    double grid_scale = 1.0;
    double grid_dealias_fraction = 2.0 / 3.0;
    // sim.*
    double sim_nu = 0.1;
    double sim_tau = 0.0;
    double sim_dt = 0.0;  // 0 = CFL estimate
    double sim_t_end = 1.0;
    unsigned long long sim_seed = 0;
    int sim_output_every = 10;
    bool sim_nonlinearity = true;
    double sim_cfl = 0.2;
    int sim_snapshot_every = 0;  // records between snapshots, 0 = off
    std::string sim_initial_snapshot;
    // forcing.*
    std::vector<std::array<double, 3>> forcing_modes = {
        {1, 0, 0.5}, {-1, 0, 0.5}, {1, 1, 0.5}, {-1, -1, 0.5}};
    bool forcing_auto_reflect = false;
    // output.*
    std::string output_dir = "out";
    // ensemble.*
    int ensemble_members = 1;
    int ensemble_threads = 0;  // 0 = hardware
    // balance.*
    double balance_burn_in = 0.0;  // 0 = default rule
    int balance_batches = 10;
    double balance_tol = 0.10;
    // spectrum.*
    double spectrum_t_start = 0.0;  // 0 = default burn-in
    int spectrum_sample_every = 10;  // records between samples
    double spectrum_kappa_lo = 0.0;
    double spectrum_kappa_hi = 0.0;
    // contraction.*
    std::vector<double> contraction_cutoffs = {4, 8, 16};
    double contraction_T = 0.25;
    double contraction_p = 1.0;
    int contraction_samples = 8;
    double contraction_burn_in = 0.0;
    // survey.*
    int survey_samples = 50;
    double survey_alpha = 0.1;
    int survey_low_cutoff = 2;
    int survey_galerkin_cutoff = 3;
    double survey_interval = 1.0;
    int survey_substeps = 100;
    double survey_burn_in = 1.0;
    // control.*
    std::vector<double> control_lambdas = {1e-4, 1e-3, 1e-2};
    int control_cutoff = 2;
    int control_intervals = 12;
    int control_substeps = 100;
    int control_seeds = 20;
    double control_xi_decay = 1.0;  // spectral decay of the initial rho
    // couple.*
    double couple_T = 5.0;
    int couple_cutoff = 4;
    std::vector<double> couple_delta_mode = {6, 0};
    double couple_delta_amp = 0.1;
    std::string couple_snapshot_a;
    std::string couple_snapshot_b;

    SimConfig sim_config() const;
    ForcingSpec forcing_spec() const;
};

/// Key-value access used by the file parser, the CLI mirror and the
/// effective-config echo.
class ConfigSchema {
  public:
    explicit ConfigSchema(RunConfig& cfg);

    const std::vector<std::string>& keys() const { return order_; }
    /// Throws std::invalid_argument naming the key on unknown key/bad value.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

  private:
    struct Entry {
        std::function<void(const std::string&)> set;
        std::function<std::string()> get;
    };
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;
};

/// Parses `key = value` lines ('#' comments); later assignments win.
void apply_config_file(ConfigSchema& schema, const std::string& path);
/// Applies key=value strings (flag overrides).
void apply_overrides(ConfigSchema& schema,
                     const std::vector<std::string>& assignments);
/// Writes the fully materialized config plus the code version.
void write_effective_config(const ConfigSchema& schema, const std::string& path);

}  // namespace vort2d
