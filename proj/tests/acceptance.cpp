// Acceptance suite: one function per criterion, each printing a PASS/FAIL
// line with the measured numbers. Run with a criterion number (1..12) or
// with no arguments for the full list. Criterion 11 is the long spectrum
// run, skipped (exit 77) unless VORT2D_RELEASE_TESTS=1.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "cone_oracle.hpp"
#include "vort2d/config.hpp"
#include "vort2d/diagnostics.hpp"
#include "vort2d/malliavin.hpp"
#include "vort2d/tangent.hpp"

using namespace vort2d;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [FAILED: " << what << "]";
        }
    }
};

std::vector<ForcingMode> degenerate_modes(double gamma) {
    return {{1, 0, gamma}, {-1, 0, gamma}, {1, 1, gamma}, {-1, -1, gamma}};
}

double rel_diff(const VorticityState& a, const VorticityState& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.coeffs.size(); ++i) {
        num = std::max(num, std::abs(a.coeffs[i] - b.coeffs[i]));
        den = std::max(den, std::abs(b.coeffs[i]));
    }
    return den > 0 ? num / den : num;
}

int hardware_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

// --- 1: oracle equivalence ---------------------------------------------------

Check criterion_1() {
    Check c;
    const GridSpec g{16, 1.0, 2.0 / 3.0};
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        auto w = project_low(random_state(g, 1000 + s, 0.5), 5);
        enforce_invariants(w);
        worst = std::max(worst, rel_diff(nonlinear(w), nonlinear_direct(w, 5)));
    }
    c.detail << "max relative deviation " << worst << " over 100 states";
    c.require(worst <= 1e-10, "oracle deviation > 1e-10");
    return c;
}

// --- 2: conservation identities ------------------------------------------------

Check criterion_2() {
    Check c;
    const GridSpec g{64, 1.0, 2.0 / 3.0};
    double worst_z = 0.0, worst_e = 0.0;
    for (int s = 0; s < 100; ++s) {
        const auto w = random_state(g, 2000 + s);
        const auto t = nonlinear(w);
        const double nt = l2_norm(t);
        worst_z = std::max(worst_z, std::abs(inner(t, w)) / (l2_norm(w) * nt));
        VorticityState invlap(g);
        const int n = g.n;
        for (int i1 = 0; i1 < n; ++i1) {
            const double m1 = mode_of_index(i1, n);
            for (int i2 = 0; i2 < n; ++i2) {
                const double m2 = mode_of_index(i2, n);
                const double mm = m1 * m1 + m2 * m2;
                if (mm > 0)
                    invlap.coeffs[static_cast<size_t>(i1) * n + i2] =
                        w.coeffs[static_cast<size_t>(i1) * n + i2] / mm;
            }
        }
        worst_e = std::max(worst_e,
                           std::abs(inner(t, invlap)) / (l2_norm(invlap) * nt));
    }
    c.detail << "enstrophy pairing " << worst_z << ", energy pairing " << worst_e;
    c.require(worst_z <= 1e-10, "enstrophy neutrality > 1e-10");
    c.require(worst_e <= 1e-10, "energy neutrality > 1e-10");
    return c;
}

// --- 3: Hoermander checker -----------------------------------------------------

Check criterion_3() {
    Check c;
    const auto ok = hormander_check(
        {{{1, 0}}, {{-1, 0}}, {{1, 1}}, {{-1, -1}}});
    c.require(ok.pass(), "degenerate four-mode example should pass");
    const auto eq = hormander_check({{{1, 0}}, {{-1, 0}}, {{0, 1}}, {{0, -1}}});
    c.require(!eq.pass() && eq.cond_a && !eq.cond_b && eq.cond_c,
              "equal-length set must fail exactly (b)");
    const auto even =
        hormander_check({{{2, 0}}, {{-2, 0}}, {{2, 2}}, {{-2, -2}}});
    c.require(!even.pass() && even.cond_a && even.cond_b && !even.cond_c,
              "even sublattice must fail exactly (c)");
    c.detail << "example pass; counterexamples flag (b) and (c) respectively";
    return c;
}

// --- 4: a-priori bounds ---------------------------------------------------------

SimConfig bounds_cfg() {
    SimConfig cfg;
    cfg.grid = {64, 1.0, 2.0 / 3.0};
    cfg.nu = 0.1;
    cfg.tau = 0.0;
    cfg.dt = 0.002;
    cfg.t_end = 20.0;
    cfg.output_every = 250;  // records every 0.5
    cfg.seed = 7;
    cfg.forcing = validate_forcing(degenerate_modes(0.5));
    return cfg;
}

Check criterion_4() {
    Check c;
    SimConfig cfg = bounds_cfg();
    VorticityState w0 = random_state(cfg.grid, 99, 2.0, 1.0);
    {  // normalize ||w0||^2 to 300 (well above the stationary level)
        const double target = std::sqrt(300.0 / l2_norm_sq(w0));
        for (auto& v : w0.coeffs) v *= target;
    }
    const auto ens = run_ensemble(cfg, w0, 128, hardware_threads());
    const auto rep = moment_bound_check(ens, cfg, l2_norm_sq(w0), {0.25});
    c.detail << "worst margins: L2 " << rep.worst_l2_margin << ", exp "
             << rep.worst_exp_margin << ", H1-integral " << rep.worst_h1_margin
             << " (eta = nu/(4 eps))";
    c.require(rep.l2_bound_ok, "second-moment bound violated");
    c.require(rep.exp_bound_ok, "exponential moment bound violated");
    c.require(rep.h1_int_bound_ok, "H1 time-integral bound violated");
    return c;
}

// --- 5: stationary balance ------------------------------------------------------

Check criterion_5() {
    Check c;
    SimConfig cfg = bounds_cfg();
    cfg.tau = 0.05;
    cfg.t_end = 100.0;
    cfg.output_every = 125;  // records every 0.25
    const auto ens =
        run_ensemble(cfg, VorticityState(cfg.grid), 128, hardware_threads());
    const double burn = default_burn_in(cfg);
    const auto rep = balance_report(ens, cfg, burn, 16);
    c.detail << "enstrophy residual " << rep.residual_enstrophy
             << ", energy residual " << rep.residual_energy << " (burn-in "
             << burn << ")";
    c.require(std::abs(rep.residual_enstrophy) <= 0.10,
              "enstrophy balance off by more than 10%");
    c.require(std::abs(rep.residual_energy) <= 0.10,
              "energy balance off by more than 10%");
    return c;
}

// --- 6: tangent and adjoint -----------------------------------------------------

Check criterion_6() {
    Check c;
    SimConfig cfg;
    cfg.grid = {32, 1.0, 2.0 / 3.0};
    cfg.nu = 0.3;
    cfg.tau = 0.05;
    cfg.dt = 0.01;
    cfg.seed = 3;
    cfg.forcing = validate_forcing(degenerate_modes(0.4));
    const int steps = 50;
    const VorticityState w0 = random_state(cfg.grid, 41, 1.0, 0.8);
    PhiloxNoise noise(cfg.forcing, cfg.grid, cfg.dt, cfg.seed, 0);
    const FrozenPath path = freeze_path(cfg, w0, noise, steps, cfg.dt);
    TangentOps ops(cfg, cfg.dt);

    const VorticityState xi = random_state(cfg.grid, 42, 1.0, 1.0);
    const VorticityState jxi = ops.forward_sweep(path, xi);
    auto flow = [&](const VorticityState& start) {
        PhiloxNoise shared(cfg.forcing, cfg.grid, cfg.dt, cfg.seed, 0);
        SimConfig run = cfg;
        run.t_end = steps * cfg.dt;
        run.output_every = 1 << 30;
        return simulate(run, start, shared).final_state;
    };
    const VorticityState base = flow(w0);
    std::vector<double> errs;
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
        VorticityState pert = w0;
        for (size_t i = 0; i < pert.coeffs.size(); ++i)
            pert.coeffs[i] += h * xi.coeffs[i];
        const VorticityState out = flow(pert);
        double err = 0.0;
        VorticityState fd = out;
        for (size_t i = 0; i < fd.coeffs.size(); ++i)
            fd.coeffs[i] = (out.coeffs[i] - base.coeffs[i]) / h - jxi.coeffs[i];
        err = l2_norm(fd) / l2_norm(jxi);
        errs.push_back(err);
    }
    c.detail << "fd errors";
    for (double e : errs) c.detail << " " << e;
    for (size_t i = 1; i < errs.size(); ++i) {
        const double ratio = errs[i - 1] / errs[i];
        c.require(ratio > 4.0 && ratio < 25.0,
                  "fd error not ~10x per decade of h");
    }

    double worst_pairing = 0.0;
    for (int s = 0; s < 50; ++s) {
        const auto a = random_state(cfg.grid, 500 + s, 0.7);
        const auto b = random_state(cfg.grid, 600 + s, 0.7);
        const double lhs = inner(ops.forward_sweep(path, a), b);
        const double rhs = inner(a, ops.adjoint_sweep(path, b));
        worst_pairing = std::max(
            worst_pairing, std::abs(lhs - rhs) / (l2_norm(a) * l2_norm(b)));
    }
    c.detail << "; adjoint pairing " << worst_pairing;
    c.require(worst_pairing <= 1e-8, "adjoint pairing > 1e-8");
    return c;
}

// --- 7: high-mode contraction ---------------------------------------------------

Check criterion_7() {
    Check c;
    SimConfig stokes;
    stokes.grid = {64, 1.0, 2.0 / 3.0};
    stokes.nu = 0.5;
    stokes.tau = 0.0;
    stokes.dt = 0.01;
    stokes.nonlinearity = false;
    const double T = 0.1;
    for (int cutoff : {4, 8, 16}) {
        const auto stat =
            contraction_stat(stokes, VorticityState(stokes.grid), cutoff, T,
                             1.0, 1, 1000, 1e-11);
        const double predicted = stat.diagonal_prediction;
        const double err =
            std::abs(stat.mean_out - predicted) / predicted;
        c.detail << "stokes c" << cutoff << " err " << err << "; ";
        c.require(err <= 1e-8, "Stokes norm does not match the diagonal value");
        c.require(stat.samples[0].converged, "Stokes power iteration stalled");
    }

    SimConfig cfg = stokes;
    cfg.nonlinearity = true;
    cfg.seed = 11;
    cfg.forcing = validate_forcing(degenerate_modes(0.2));
    SimConfig warm = cfg;
    warm.t_end = 4.0;
    warm.output_every = 1 << 30;
    VorticityState w0 = simulate(warm).final_state;
    w0.time = 0.0;
    // Weak nonlinearity splits the top shells only slightly, so the Rayleigh
    // estimate plateaus (to ~0.5% here) long before the iterate settles;
    // plenty for the factor-2 band.
    for (int cutoff : {4, 8, 16}) {
        const auto stat = contraction_stat(cfg, w0, cutoff, T, 1.0, 4, 1000, 1e-5);
        const double ratio = stat.mean_out / stat.diagonal_prediction;
        c.detail << "nl c" << cutoff << " ratio " << ratio << "; ";
        c.require(ratio > 0.5 && ratio < 2.0,
                  "nonlinear estimate beyond 2x of the diagonal prediction");
        for (const auto& s : stat.samples)
            c.require(s.converged, "power iteration did not converge");
    }
    return c;
}

// --- 8: Malliavin matrix --------------------------------------------------------

Check criterion_8() {
    Check c;
    SimConfig cfg;
    cfg.grid = {32, 1.0, 2.0 / 3.0};
    cfg.nu = 0.25;
    cfg.tau = 0.1;
    cfg.nonlinearity = false;
    cfg.forcing = validate_forcing(
        {{1, 0, 0.8}, {-1, 0, 0.8}, {1, 1, 0.5}, {-1, -1, 0.5}});
    GalerkinBasis basis(cfg.grid, 2);

    // Stokes entrywise OU check with quadrature self-convergence ratio ~ 4.
    auto stokes_M = [&](int substeps) {
        ZeroNoise noise(cfg.grid);
        FrozenPath path = freeze_path(cfg, VorticityState(cfg.grid), noise,
                                      substeps, 1.0 / substeps);
        return assemble_matrix(path, cfg.forcing, basis);
    };
    double worst_entry = 0.0;
    std::vector<double> errs;
    int sin10_idx = -1;
    for (int a = 0; a < basis.size(); ++a)
        if (basis.mode(a)[0] == 1 && basis.mode(a)[1] == 0) sin10_idx = a;
    for (int substeps : {16, 32, 64}) {
        const Eigen::MatrixXd M = stokes_M(substeps);
        const double arate = cfg.damping(1, 0);
        const double exact = 0.64 * (1 - std::exp(-2 * arate)) / (2 * arate);
        errs.push_back(std::abs(M(sin10_idx, sin10_idx) - exact));
        if (substeps == 64) {
            for (int a = 0; a < basis.size(); ++a)
                for (int b = 0; b < basis.size(); ++b) {
                    double gamma = 0.0;
                    const auto& ka = basis.mode(a);
                    for (const auto& f : cfg.forcing.modes)
                        if (f.k1 == ka[0] && f.k2 == ka[1]) gamma = f.gamma;
                    const double ar = cfg.damping(ka[0], ka[1]);
                    const double expect =
                        (a == b) ? gamma * gamma *
                                       (1 - std::exp(-2 * ar)) / (2 * ar)
                                 : 0.0;
                    worst_entry = std::max(worst_entry,
                                           std::abs(M(a, b) - expect));
                }
        }
    }
    const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    c.detail << "OU entry worst abs dev " << worst_entry
             << " at 64 substeps; Richardson ratios " << r1 << ", " << r2;
    c.require(worst_entry < 5e-4, "Stokes matrix far from the OU closed form");
    c.require(std::abs(r1 - 4.0) < 0.8 && std::abs(r2 - 4.0) < 0.8,
              "quadrature not second order");

    // Symmetric PSD on a nonlinear path.
    {
        SimConfig nl = cfg;
        nl.nonlinearity = true;
        PhiloxNoise noise(nl.forcing, nl.grid, 0.01, 5, 0);
        FrozenPath path = freeze_path(nl, random_state(nl.grid, 8, 1.0, 0.5),
                                      noise, 100, 0.01);
        const Eigen::MatrixXd M = assemble_matrix(path, nl.forcing, basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        c.require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * M.trace(),
                  "matrix not symmetric");
        c.require(es.eigenvalues().minCoeff() >= -1e-10 * M.trace(),
                  "matrix not PSD");
    }

    // cone_min against the sampled + refined search on 20 random instances.
    std::mt19937 gen(4242);
    double worst_gap = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int d = 10 + (inst * 9631) % 21;
        std::normal_distribution<double> nd;
        Eigen::MatrixXd A(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A(i, j) = nd(gen);
        Eigen::MatrixXd M = A * A.transpose() / d;
        M = 0.5 * (M + M.transpose()).eval();
        std::vector<int> low;
        for (int i = 0; i < d; ++i)
            if (std::uniform_real_distribution<double>(0, 1)(gen) < 0.5)
                low.push_back(i);
        if (low.empty()) low.push_back(0);
        const double alpha =
            std::uniform_real_distribution<double>(0.2, 0.8)(gen);
        const double dual = cone_min(M, low, alpha).value;
        const double oracle = cone_oracle::brute_force_min(
            M, low, alpha, 100000, 9000 + inst);
        worst_gap = std::max(worst_gap, std::abs(dual - oracle));
        c.require(dual <= oracle + 1e-10, "dual above a sampled direction");
    }
    c.detail << "; cone_min vs 1e5-sample search worst gap " << worst_gap;
    c.require(worst_gap <= 1e-8, "cone_min off the brute-force value");
    return c;
}

// --- 9: nondegeneracy contrast ---------------------------------------------------

Check criterion_9() {
    Check c;
    SimConfig cfg;
    cfg.grid = {32, 1.0, 2.0 / 3.0};
    cfg.nu = 0.1;
    cfg.tau = 0.0;
    cfg.dt = 0.004;
    cfg.seed = 1;
    cfg.forcing = validate_forcing(degenerate_modes(1.0));

    SurveyConfig scfg;
    scfg.alpha = 0.1;
    scfg.low_cutoff = 2;
    scfg.galerkin_cutoff = 3;
    scfg.interval = 1.0;
    scfg.quad_substeps = 250;

    // Stokes: range of M is the forced span, so cones containing unforced
    // low directions are flat.
    SimConfig off = cfg;
    off.nonlinearity = false;
    SurveyConfig offcfg = scfg;
    offcfg.samples = 8;
    offcfg.burn_in = 0.0;
    const auto deg = nondegeneracy_survey(off, offcfg);
    double worst_off = 0.0;
    for (const auto& s : deg.samples) worst_off = std::max(worst_off, s.cone_min);
    c.detail << "Stokes max cone_min " << worst_off;
    c.require(worst_off <= 1e-12, "degenerate case not flat");

    SurveyConfig oncfg = scfg;
    oncfg.samples = 50;
    oncfg.burn_in = 5.0;
    const auto res = nondegeneracy_survey(cfg, oncfg);
    c.detail << "; nonlinear median " << res.median << " (q10 " << res.q10
             << ", q90 " << res.q90 << ", tail exponent " << res.tail_exponent
             << ")";
    c.require(res.median > 0.0, "nonlinear median not positive");
    c.require(res.median > 1e-12, "nonlinear median at numerical noise level");
    return c;
}

// --- 10: control decay ------------------------------------------------------------

Check criterion_10() {
    Check c;
    SimConfig cfg;
    cfg.grid = {32, 1.0, 2.0 / 3.0};
    cfg.nu = 0.5;
    cfg.tau = 0.0;
    cfg.dt = 0.01;
    cfg.seed = 5;
    cfg.forcing = validate_forcing(degenerate_modes(0.5));

    const int n_intervals = 12;  // m = 1..6 pairs
    const int seeds = 20;
    double worst_residual = 0.0;
    double best_rate = 1e300;
    double best_lambda = 0.0;
    for (double lambda : {1e-4, 1e-3, 1e-2}) {
        std::vector<std::vector<double>> ratios(7);
        for (int seed = 0; seed < seeds; ++seed) {
            const VorticityState xi0 =
                random_state(cfg.grid, 7000 + seed, 1.0, 1.0);
            const auto run = control_run(cfg, xi0, lambda, 2, n_intervals, 100,
                                         seed);
            double prev_norm = run.rho0_norm;
            for (const auto& r : run.records) {
                if (r.n % 2 == 0)
                    worst_residual = std::max(
                        worst_residual, r.identity_residual / prev_norm);
                prev_norm = r.rho_norm;
                if (r.n % 2 == 1) {
                    const int m = (r.n + 1) / 2;
                    ratios[m].push_back(r.rho_norm / run.rho0_norm);
                }
            }
        }
        // Geometric fit of the median ||rho(2m)||/||rho(0)|| against m.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int m = 1; m <= 6; ++m) {
            auto& v = ratios[m];
            std::sort(v.begin(), v.end());
            const double med = v[v.size() / 2];
            sx += m;
            sy += std::log(med);
            sxx += double(m) * m;
            sxy += m * std::log(med);
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double rate = std::exp(slope);
        c.detail << "lambda " << lambda << " rate " << rate << "; ";
        if (rate < best_rate) {
            best_rate = rate;
            best_lambda = lambda;
        }
    }
    c.detail << "best " << best_rate << " at lambda " << best_lambda
             << "; worst identity residual " << worst_residual;
    c.require(worst_residual <= 1e-8, "control identity residual > 1e-8");
    c.require(best_rate < 0.9, "no lambda in the ladder decays at rate < 0.9");
    return c;
}

// --- 11: spectrum slopes (release) --------------------------------------------------

Check criterion_11() {
    Check c;
    SimConfig cfg;
    cfg.grid = {256, 1.0, 2.0 / 3.0};
    cfg.nu = 3e-4;
    cfg.tau = 0.02;
    cfg.dt = 0.004;
    cfg.seed = 20;
    cfg.output_every = 125;  // sample cadence 0.5
    std::vector<ForcingMode> shell;
    for (int k1 = -21; k1 <= 21; ++k1)
        for (int k2 = -21; k2 <= 21; ++k2) {
            const double r = std::hypot(double(k1), double(k2));
            if (r >= 19.5 && r <= 20.5) shell.push_back({k1, k2, 0.05});
        }
    cfg.forcing = validate_forcing(shell);
    cfg.t_end = 220.0;
    const double t_start = 60.0;

    SpectrumAccumulator acc;
    StateObserver observer = [&](const VorticityState& w, std::uint64_t) {
        if (w.time >= t_start) acc.add(w);
    };
    simulate(cfg, std::nullopt, 0, observer);
    const SpectrumSeries spec = acc.series();
    const SlopeFit fit = slope_fit(spec, 30.0, 70.0, cfg);
    c.detail << "direct-cascade slope " << fit.slope << " +- "
             << fit.stderr_slope << " over " << fit.n_shells
             << " shells (kappa_nu " << fit.kappa_nu << ", kappa_tau "
             << fit.kappa_tau << ", samples " << spec.n_states << ")";
    // Below the forcing shell the fitted slope is reported without a bound
    // (no inverse-cascade claim at this scale separation).
    if (spec.kappa.size() > 15) {
        try {
            const SlopeFit low = slope_fit(spec, 5.0, 15.0, cfg);
            c.detail << "; sub-forcing slope (reported only) " << low.slope;
        } catch (const std::exception&) {
        }
    }
    c.require(fit.slope >= -3.6 && fit.slope <= -2.6,
              "direct-cascade slope outside [-3.6, -2.6]");
    return c;
}

// --- 12: determinism -----------------------------------------------------------------

Check criterion_12() {
    Check c;
    const char* cli = std::getenv("VORT2D_CLI");
    if (!cli) {
        c.require(false, "VORT2D_CLI not set");
        return c;
    }
    const fs::path base =
        fs::temp_directory_path() / "vort2d_acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);

    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::string& args, const fs::path& dir) {
        const std::string cmd = std::string(cli) + " " + args +
                                " --output.dir " + dir.string() +
                                " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    const std::string sim_args =
        "simulate --grid.n 64 --sim.nu 0.1 --sim.dt 0.005 --sim.t_end 2 "
        "--sim.seed 42 --sim.output_every 20";
    c.require(run(sim_args, base / "sim_a") == 0, "simulate run failed");
    c.require(run(sim_args, base / "sim_b") == 0, "simulate rerun failed");
    c.require(read_file(base / "sim_a" / "observables.csv") ==
                  read_file(base / "sim_b" / "observables.csv"),
              "simulate CSVs differ between identical runs");
    c.require(!read_file(base / "sim_a" / "observables.csv").empty(),
              "simulate CSV empty");
    c.require(read_file(base / "sim_a" / "final_state.vort") ==
                  read_file(base / "sim_b" / "final_state.vort"),
              "final snapshots differ");

    const std::string survey_args =
        "malliavin-survey --grid.n 32 --sim.nu 0.25 --sim.dt 0.02 "
        "--sim.seed 11 --survey.samples 6 --survey.substeps 50 "
        "--survey.burn_in 0.5";
    c.require(run(survey_args, base / "ms_a") == 0, "survey run failed");
    c.require(run(survey_args, base / "ms_b") == 0, "survey rerun failed");
    c.require(read_file(base / "ms_a" / "survey.csv") ==
                  read_file(base / "ms_b" / "survey.csv"),
              "survey CSVs differ between identical runs");
    c.require(!read_file(base / "ms_a" / "survey.csv").empty(),
              "survey CSV empty");
    c.detail << "simulate and malliavin-survey byte-identical across reruns";
    fs::remove_all(base);
    return c;
}

const std::map<int, std::pair<const char*, std::function<Check()>>> kCriteria = {
    {1, {"oracle equivalence (pseudo-spectral vs Galerkin sum)", criterion_1}},
    {2, {"conservation identities of the transport term", criterion_2}},
    {3, {"Hoermander checker on example and counterexamples", criterion_3}},
    {4, {"a-priori moment bounds on a 128-member ensemble", criterion_4}},
    {5, {"stationary enstrophy/energy balance within 10%", criterion_5}},
    {6, {"tangent finite-difference and adjoint pairing", criterion_6}},
    {7, {"high-mode contraction vs diagonal prediction", criterion_7}},
    {8, {"Malliavin matrix OU form, PSD, cone_min vs search", criterion_8}},
    {9, {"nondegeneracy contrast (Stokes flat, nonlinear positive)", criterion_9}},
    {10, {"low-mode control identity and decay", criterion_10}},
    {11, {"direct-cascade spectrum slope (release)", criterion_11}},
    {12, {"byte-identical reruns of simulate and malliavin-survey", criterion_12}},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    } else {
        for (const auto& [num, entry] : kCriteria) selected.push_back(num);
    }

    bool all_ok = true;
    for (int num : selected) {
        const auto it = kCriteria.find(num);
        if (it == kCriteria.end()) {
            std::cerr << "unknown criterion " << num << "\n";
            return 2;
        }
        if (num == 11 && !std::getenv("VORT2D_RELEASE_TESTS")) {
            std::cout << "[SKIP] criterion 11: " << it->second.first
                      << " (set VORT2D_RELEASE_TESTS=1 to run)" << std::endl;
            if (selected.size() == 1) return 77;
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        const Check c = it->second.second();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << num
                  << ": " << it->second.first << " -- " << c.detail.str()
                  << " (" << secs << " s)" << std::endl;
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : 1;
}
