// vort2d command line: configuration, experiment dispatch, reproducible
// batch output. Exit codes: 0 success, 1 asserted bound failed, 2 usage or
// configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "vort2d/config.hpp"
#include "vort2d/diagnostics.hpp"
#include "vort2d/malliavin.hpp"
#include "vort2d/tangent.hpp"

namespace fs = std::filesystem;
using namespace vort2d;

namespace {

std::string g17(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Summary {
    std::vector<std::pair<std::string, std::string>> kv;
    void add(const std::string& k, const std::string& v) { kv.push_back({k, v}); }
    void add(const std::string& k, double v) { add(k, g17(v)); }
    void add(const std::string& k, bool v) { add(k, v ? std::string("true") : std::string("false")); }
    void write(const fs::path& path) const {
        std::ofstream out(path);
        for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    }
};

fs::path resolve_output_dir(const RunConfig& cfg) {
    fs::path dir = cfg.output_dir;
    if (const char* root = std::getenv("VORT2D_OUT_ROOT"))
        dir = fs::path(root) / dir;
    fs::create_directories(dir);
    return dir;
}

VorticityState initial_state(const RunConfig& cfg, const SimConfig& sim) {
    if (cfg.sim_initial_snapshot.empty()) return VorticityState(sim.grid);
    VorticityState w = checkpoint_load(cfg.sim_initial_snapshot);
    if (w.grid.n != sim.grid.n)
        throw std::invalid_argument(
            "initial snapshot lattice size " + std::to_string(w.grid.n) +
            " does not match grid.n = " + std::to_string(sim.grid.n));
    if (w.grid.scale != sim.grid.scale)
        throw std::invalid_argument("initial snapshot torus scale differs from grid.scale");
    w.grid = sim.grid;
    validate_state(w);
    return w;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    const VorticityState w0 = initial_state(cfg, sim);
    std::ofstream csv(dir / "observables.csv");
    csv << "t,enstrophy,energy,h1_sq,noise_qv\n";

    StateObserver observer;
    if (cfg.sim_snapshot_every > 0) {
        auto counter = std::make_shared<int>(0);
        observer = [&, counter](const VorticityState& w, std::uint64_t) {
            if ((*counter)++ % cfg.sim_snapshot_every == 0) {
                char name[64];
                snprintf(name, sizeof name, "snapshot_%012.6f.vort", w.time);
                checkpoint_save(w, (dir / name).string());
            }
        };
    }
    const Trajectory traj = simulate(sim, w0, 0, observer);
    for (const auto& r : traj.records)
        csv << g17(r.t) << "," << g17(r.enstrophy) << "," << g17(r.energy) << ","
            << g17(r.h1_sq) << "," << g17(r.noise_qv) << "\n";
    checkpoint_save(traj.final_state, (dir / "final_state.vort").string());

    Summary s;
    s.add("subcommand", std::string("simulate"));
    s.add("records", static_cast<double>(traj.records.size()));
    s.add("t_final", traj.records.back().t);
    s.add("enstrophy_final", traj.records.back().enstrophy);
    s.add("energy_final", traj.records.back().energy);
    s.add("eps", sim.forcing.eps);
    s.add("eps_prime", sim.forcing.eps_prime);
    s.add("pass", true);
    s.write(dir / "summary.txt");
    return 0;
}

int cmd_check_forcing(const RunConfig& cfg, const fs::path& dir) {
    const ForcingSpec spec = cfg.forcing_spec();
    const HormanderReport rep = hormander_check(spec);
    std::cout << rep.describe() << "\n";
    std::cout << "eps = " << g17(spec.eps) << "\neps_prime = " << g17(spec.eps_prime)
              << "\nkappa_f = " << g17(spec.kappa_f)
              << "\nkappa_f_rms = " << g17(spec.kappa_f_rms) << "\n";
    Summary s;
    s.add("subcommand", std::string("check-forcing"));
    s.add("cond_a", rep.cond_a);
    s.add("cond_b", rep.cond_b);
    s.add("cond_c", rep.cond_c);
    s.add("eps", spec.eps);
    s.add("eps_prime", spec.eps_prime);
    s.add("kappa_f", spec.kappa_f);
    s.add("kappa_f_rms", spec.kappa_f_rms);
    s.add("pass", rep.pass());
    s.write(dir / "summary.txt");
    return rep.pass() ? 0 : 1;
}

int cmd_balance(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    const VorticityState w0 = initial_state(cfg, sim);
    const double burn = cfg.balance_burn_in > 0.0 ? cfg.balance_burn_in
                                                  : default_burn_in(sim);
    const auto ensemble =
        run_ensemble(sim, w0, cfg.ensemble_members, cfg.ensemble_threads);
    const BalanceReport rep =
        balance_report(ensemble, sim, burn, cfg.balance_batches);

    Summary s;
    s.add("subcommand", std::string("balance"));
    s.add("burn_in", burn);
    s.add("window_end", rep.window_end);
    s.add("n_records", static_cast<double>(rep.n_records));
    s.add("visc_enstrophy", rep.visc_enstrophy);
    s.add("fric_enstrophy", rep.fric_enstrophy);
    s.add("target_enstrophy", rep.target_enstrophy);
    s.add("residual_enstrophy", rep.residual_enstrophy);
    s.add("ci_enstrophy", rep.ci_enstrophy);
    s.add("visc_energy", rep.visc_energy);
    s.add("fric_energy", rep.fric_energy);
    s.add("target_energy", rep.target_energy);
    s.add("residual_energy", rep.residual_energy);
    s.add("ci_energy", rep.ci_energy);
    const bool pass = std::abs(rep.residual_enstrophy) <= cfg.balance_tol &&
                      std::abs(rep.residual_energy) <= cfg.balance_tol;
    s.add("tol", cfg.balance_tol);
    s.add("pass", pass);
    s.write(dir / "balance.txt");
    std::cout << "enstrophy residual " << rep.residual_enstrophy
              << ", energy residual " << rep.residual_energy << " (tol "
              << cfg.balance_tol << ")\n";
    return pass ? 0 : 1;
}

int cmd_spectrum(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    const VorticityState w0 = initial_state(cfg, sim);
    const double t_start = cfg.spectrum_t_start > 0.0 ? cfg.spectrum_t_start
                                                      : default_burn_in(sim);
    SpectrumAccumulator acc;
    auto sample_count = std::make_shared<int>(0);
    StateObserver observer = [&, sample_count](const VorticityState& w,
                                               std::uint64_t) {
        if (w.time < t_start) return;
        if ((*sample_count)++ % cfg.spectrum_sample_every == 0) acc.add(w);
    };
    simulate(sim, w0, 0, observer);
    const SpectrumSeries spec = acc.series();
    if (spec.n_states == 0)
        throw std::invalid_argument("spectrum: window shorter than t_start");

    std::ofstream csv(dir / "spectrum.csv");
    csv << "kappa,e_kappa\n";
    for (size_t i = 0; i < spec.kappa.size(); ++i)
        csv << g17(spec.kappa[i]) << "," << g17(spec.e[i]) << "\n";

    Summary s;
    s.add("subcommand", std::string("spectrum"));
    s.add("samples", static_cast<double>(spec.n_states));
    s.add("energy_density", spec.energy_density());
    s.add("enstrophy_density", spec.enstrophy_density());
    if (cfg.spectrum_kappa_hi > cfg.spectrum_kappa_lo) {
        const SlopeFit fit =
            slope_fit(spec, cfg.spectrum_kappa_lo, cfg.spectrum_kappa_hi, sim);
        s.add("slope", fit.slope);
        s.add("slope_stderr", fit.stderr_slope);
        s.add("fit_shells", static_cast<double>(fit.n_shells));
        s.add("kappa_nu", fit.kappa_nu);
        s.add("kappa_tau", fit.kappa_tau);
        std::cout << "slope " << fit.slope << " +- " << fit.stderr_slope << "\n";
    }
    s.add("pass", true);
    s.write(dir / "summary.txt");
    return 0;
}

int cmd_contraction(const RunConfig& cfg, const fs::path& dir) {
    SimConfig sim = cfg.sim_config();
    VorticityState w0(sim.grid);
    if (cfg.contraction_burn_in > 0.0) {
        SimConfig warm = sim;
        warm.t_end = cfg.contraction_burn_in;
        warm.output_every = 1 << 30;
        w0 = simulate(warm).final_state;
        w0.time = 0.0;
    }
    std::ofstream csv(dir / "contraction.csv");
    std::ofstream csv_in(dir / "contraction_in.csv");
    csv << "cutoff,T,p,mean,ci_lo,ci_hi,samples\n";
    csv_in << "cutoff,T,p,mean,ci_lo,ci_hi,samples\n";
    Summary s;
    s.add("subcommand", std::string("contraction"));
    int capped = 0;
    for (double c : cfg.contraction_cutoffs) {
        const auto stat = contraction_stat(sim, w0, static_cast<int>(c),
                                           cfg.contraction_T, cfg.contraction_p,
                                           cfg.contraction_samples);
        for (const auto& smp : stat.samples)
            if (!smp.converged) ++capped;
        csv << static_cast<int>(c) << "," << g17(stat.T) << "," << g17(stat.p)
            << "," << g17(stat.mean_out) << "," << g17(stat.ci_lo_out) << ","
            << g17(stat.ci_hi_out) << "," << stat.samples.size() << "\n";
        csv_in << static_cast<int>(c) << "," << g17(stat.T) << "," << g17(stat.p)
               << "," << g17(stat.mean_in) << "," << g17(stat.ci_lo_in) << ","
               << g17(stat.ci_hi_in) << "," << stat.samples.size() << "\n";
        s.add("mean_out_cutoff_" + std::to_string(static_cast<int>(c)),
              stat.mean_out);
        s.add("diag_prediction_cutoff_" + std::to_string(static_cast<int>(c)),
              std::pow(stat.diagonal_prediction, cfg.contraction_p));
    }
    s.add("power_iterations_capped", static_cast<double>(capped));
    s.add("pass", true);
    s.write(dir / "summary.txt");
    return 0;
}

int cmd_survey(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    SurveyConfig scfg;
    scfg.samples = cfg.survey_samples;
    scfg.alpha = cfg.survey_alpha;
    scfg.low_cutoff = cfg.survey_low_cutoff;
    scfg.galerkin_cutoff = cfg.survey_galerkin_cutoff;
    scfg.interval = cfg.survey_interval;
    scfg.quad_substeps = cfg.survey_substeps;
    scfg.burn_in = cfg.survey_burn_in;
    const HormanderReport hrep = hormander_check(sim.forcing);
    if (!hrep.pass())
        std::cerr << "warning: forcing fails the Hoermander conditions\n"
                  << hrep.describe() << "\n";
    const SurveyResult res = nondegeneracy_survey(sim, scfg);

    std::ofstream csv(dir / "survey.csv");
    csv << "sample,cone_min,norm_w0\n";
    for (size_t i = 0; i < res.samples.size(); ++i)
        csv << i << "," << g17(res.samples[i].cone_min) << ","
            << g17(res.samples[i].norm_w0) << "\n";
    Summary s;
    s.add("subcommand", std::string("malliavin-survey"));
    s.add("median", res.median);
    s.add("q10", res.q10);
    s.add("q90", res.q90);
    s.add("tail_exponent", res.tail_exponent);
    s.add("hormander_pass", hrep.pass());
    s.add("pass", true);
    s.write(dir / "summary.txt");
    std::cout << "cone_min median " << res.median << " (q10 " << res.q10
              << ", q90 " << res.q90 << ")\n";
    return 0;
}

int cmd_control(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    Summary s;
    s.add("subcommand", std::string("control"));
    double max_residual = 0.0;
    for (size_t li = 0; li < cfg.control_lambdas.size(); ++li) {
        const double lambda = cfg.control_lambdas[li];
        std::vector<double> rates;
        for (int seed = 0; seed < cfg.control_seeds; ++seed) {
            const VorticityState xi0 = random_state(
                sim.grid, 0xC0DE + 31 * seed, cfg.control_xi_decay);
            const ControlRun run =
                control_run(sim, xi0, lambda, cfg.control_cutoff,
                            cfg.control_intervals, cfg.control_substeps,
                            /*noise_stream=*/seed);
            char name[64];
            snprintf(name, sizeof name, "control_l%02zu_s%03d.csv", li, seed);
            std::ofstream csv(dir / name);
            csv << "n,rho_norm,rho_low_norm,control_energy,identity_residual\n";
            for (const auto& r : run.records) {
                csv << r.n << "," << g17(r.rho_norm) << "," << g17(r.rho_low_norm)
                    << "," << g17(r.control_energy) << ","
                    << g17(r.identity_residual) << "\n";
                max_residual = std::max(
                    max_residual,
                    r.identity_residual / std::max(run.rho0_norm, 1e-300));
            }
            // Geometric rate over even milestones: ||rho(2m)||^{1/(2m)}.
            const auto& recs = run.records;
            if (recs.size() >= 2) {
                const double last = recs.back().rho_norm / run.rho0_norm;
                rates.push_back(
                    std::pow(last, 1.0 / static_cast<double>(recs.size())));
            }
        }
        std::sort(rates.begin(), rates.end());
        const double med = rates.empty() ? 0.0 : rates[rates.size() / 2];
        s.add("rate_lambda_" + g17(lambda), med);
        std::cout << "lambda " << lambda << ": median per-interval rate " << med
                  << "\n";
    }
    s.add("max_identity_residual", max_residual);
    s.add("pass", true);
    s.write(dir / "summary.txt");
    return 0;
}

int cmd_couple(const RunConfig& cfg, const fs::path& dir) {
    const SimConfig sim = cfg.sim_config();
    VorticityState a = cfg.couple_snapshot_a.empty()
                           ? VorticityState(sim.grid)
                           : checkpoint_load(cfg.couple_snapshot_a);
    VorticityState b;
    if (!cfg.couple_snapshot_b.empty()) {
        b = checkpoint_load(cfg.couple_snapshot_b);
    } else {
        b = a;
        if (cfg.couple_delta_mode.size() != 2)
            throw std::invalid_argument("couple.delta_mode needs [k1, k2]");
        add_real_coord(b, static_cast<int>(cfg.couple_delta_mode[0]),
                       static_cast<int>(cfg.couple_delta_mode[1]),
                       cfg.couple_delta_amp);
        enforce_invariants(b);
    }
    const auto series = coupling_distance(sim, a, b, cfg.couple_T,
                                          cfg.couple_cutoff);
    std::ofstream csv(dir / "coupling.csv");
    csv << "t,dist,dist_low,dist_high\n";
    for (const auto& r : series)
        csv << g17(r.t) << "," << g17(r.dist) << "," << g17(r.dist_low) << ","
            << g17(r.dist_high) << "\n";
    Summary s;
    s.add("subcommand", std::string("couple"));
    s.add("dist_initial", series.front().dist);
    s.add("dist_final", series.back().dist);
    s.add("pass", true);
    s.write(dir / "summary.txt");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic 2D vorticity toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    ConfigSchema schema(cfg);
    std::string config_path;
    std::vector<std::string> overrides;
    std::map<std::string, std::string> direct;

    const std::map<std::string, std::function<int(const RunConfig&, const fs::path&)>>
        commands = {{"simulate", cmd_simulate},
                    {"check-forcing", cmd_check_forcing},
                    {"balance", cmd_balance},
                    {"spectrum", cmd_spectrum},
                    {"contraction", cmd_contraction},
                    {"malliavin-survey", cmd_survey},
                    {"control", cmd_control},
                    {"couple", cmd_couple}};

    std::vector<CLI::App*> subs;
    for (const auto& [name, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--set", overrides,
                        "override a config key, key=value (repeatable)");
        // Every config key is also a flag, e.g. --grid.n 64. Plain string
        // targets keep bracketed list values intact.
        for (const auto& key : schema.keys())
            sub->add_option("--" + key, direct[key], "config key " + key)
                ->take_last();
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (!config_path.empty()) apply_config_file(schema, config_path);
        apply_overrides(schema, overrides);
        for (const auto& [key, value] : direct)
            if (!value.empty()) schema.set(key, value);

        const fs::path dir = resolve_output_dir(cfg);
        write_effective_config(schema, (dir / "effective_config.txt").string());

        // Non-admissible forcing is a warning, not an error.
        if (!cfg.forcing_modes.empty()) {
            const auto rep = hormander_check(cfg.forcing_spec());
            if (!rep.pass())
                std::cerr << "warning: forcing fails the Hoermander conditions "
                             "(see check-forcing)\n";
        }

        for (const auto& [name, fn] : commands)
            if (app.get_subcommand(name)->parsed()) return fn(cfg, dir);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return 2;
    } catch (const BlowUpError& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
