#include "vort2d/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vort2d {

double default_burn_in(const SimConfig& cfg) {
    return 5.0 / (cfg.nu / (cfg.grid.scale * cfg.grid.scale) + cfg.tau);
}

namespace {

// Mean and batch-mean CI half-width (1.96 sigma) of f over the window.
template <typename F>
std::pair<double, double> window_mean(const std::vector<Trajectory>& ens,
                                      double burn_in, int batches, F&& f) {
    std::vector<double> values;
    for (const auto& traj : ens)
        for (const auto& r : traj.records)
            if (r.t >= burn_in) values.push_back(f(r));
    if (values.empty())
        throw std::invalid_argument("window shorter than burn-in");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    batches = std::max(2, std::min<int>(batches, static_cast<int>(values.size())));
    const size_t per = values.size() / batches;
    std::vector<double> bm;
    for (int b = 0; b < batches; ++b) {
        const size_t lo = b * per;
        const size_t hi = (b + 1 == batches) ? values.size() : lo + per;
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += values[i];
        bm.push_back(s / (hi - lo));
    }
    double var = 0.0;
    for (double v : bm) var += (v - mean) * (v - mean);
    var /= (bm.size() - 1);
    return {mean, 1.96 * std::sqrt(var / bm.size())};
}

}  // namespace

BalanceReport balance_report(const std::vector<Trajectory>& ensemble,
                             const SimConfig& cfg, double burn_in, int batches) {
    if (ensemble.empty()) throw std::invalid_argument("balance: empty ensemble");
    const double area = cfg.grid.area();
    const double pi2 = std::numbers::pi * std::numbers::pi;

    BalanceReport rep;
    rep.window_start = burn_in;
    rep.window_end = ensemble.front().records.back().t;
    for (const auto& traj : ensemble)
        for (const auto& r : traj.records)
            if (r.t >= burn_in) ++rep.n_records;

    auto [h1, ci_h1] = window_mean(ensemble, burn_in, batches,
                                   [](const ObsRecord& r) { return r.h1_sq; });
    auto [zz, ci_zz] = window_mean(ensemble, burn_in, batches,
                                   [](const ObsRecord& r) { return 2.0 * r.enstrophy; });
    auto [uu, ci_uu] = window_mean(ensemble, burn_in, batches,
                                   [](const ObsRecord& r) { return 2.0 * r.energy; });

    rep.visc_enstrophy = cfg.nu * h1 / area;
    rep.fric_enstrophy = cfg.tau * zz / area;
    rep.target_enstrophy = cfg.forcing.eps / (8.0 * pi2);
    rep.ci_enstrophy = (cfg.nu * ci_h1 + cfg.tau * ci_zz) / area;
    rep.residual_enstrophy =
        (rep.visc_enstrophy + rep.fric_enstrophy) / rep.target_enstrophy - 1.0;

    rep.visc_energy = cfg.nu * zz / area;
    rep.fric_energy = cfg.tau * uu / area;
    rep.target_energy =
        cfg.forcing.eps_prime * cfg.grid.scale * cfg.grid.scale / (8.0 * pi2);
    rep.ci_energy = (cfg.nu * ci_zz + cfg.tau * ci_uu) / area;
    rep.residual_energy =
        (rep.visc_energy + rep.fric_energy) / rep.target_energy - 1.0;
    return rep;
}

MomentBoundReport moment_bound_check(const std::vector<Trajectory>& ensemble,
                                     const SimConfig& cfg, double w0_norm_sq,
                                     std::vector<double> eta_fractions) {
    if (ensemble.empty()) throw std::invalid_argument("moment check: empty ensemble");
    if (eta_fractions.empty()) eta_fractions = {0.25, 0.5, 1.0};
    const double eps = cfg.forcing.eps;
    const double nu_eff = cfg.nu / (cfg.grid.scale * cfg.grid.scale);
    const size_t n_rec = ensemble.front().records.size();
    const double n = static_cast<double>(ensemble.size());

    MomentBoundReport rep;
    for (double f : eta_fractions) rep.eta_values.push_back(f * cfg.nu / eps);
    rep.worst_l2_margin = 1e300;
    rep.worst_exp_margin = 1e300;
    rep.worst_h1_margin = 1e300;

    for (size_t i = 0; i < n_rec; ++i) {
        const double t = ensemble.front().records[i].t;
        double mean = 0.0, var = 0.0;
        for (const auto& traj : ensemble) {
            const double v = 2.0 * traj.records[i].enstrophy;
            mean += v;
        }
        mean /= n;
        for (const auto& traj : ensemble) {
            const double d = 2.0 * traj.records[i].enstrophy - mean;
            var += d * d;
        }
        var = n > 1 ? var / (n - 1) : 0.0;
        const double sigma = std::sqrt(var / n);
        const double bound = std::exp(-2.0 * nu_eff * t) * w0_norm_sq +
                             eps / cfg.nu + 3.0 * sigma;
        const double margin = (bound - mean) / bound;
        rep.worst_l2_margin = std::min(rep.worst_l2_margin, margin);
        if (mean > bound) rep.l2_bound_ok = false;

        for (double eta : rep.eta_values) {
            // E exp(eta ||w||^2) vs 2 exp(eta e^{-nu t} ||w0||^2)
            double m1 = 0.0, v1 = 0.0, m2 = 0.0, v2 = 0.0;
            for (const auto& traj : ensemble) {
                m1 += std::exp(eta * 2.0 * traj.records[i].enstrophy);
                m2 += std::exp(eta * cfg.nu * traj.records[i].h1_int);
            }
            m1 /= n;
            m2 /= n;
            for (const auto& traj : ensemble) {
                const double d1 =
                    std::exp(eta * 2.0 * traj.records[i].enstrophy) - m1;
                const double d2 =
                    std::exp(eta * cfg.nu * traj.records[i].h1_int) - m2;
                v1 += d1 * d1;
                v2 += d2 * d2;
            }
            v1 = n > 1 ? v1 / (n - 1) : 0.0;
            v2 = n > 1 ? v2 / (n - 1) : 0.0;
            const double b1 =
                2.0 * std::exp(eta * std::exp(-nu_eff * t) * w0_norm_sq) +
                3.0 * std::sqrt(v1 / n);
            const double b2 = 2.0 * std::exp(eta * eps * t + eta * w0_norm_sq) +
                              3.0 * std::sqrt(v2 / n);
            const double mg1 = (b1 - m1) / b1;
            const double mg2 = (b2 - m2) / b2;
            rep.worst_exp_margin = std::min(rep.worst_exp_margin, mg1);
            rep.worst_h1_margin = std::min(rep.worst_h1_margin, mg2);
            if (m1 > b1) rep.exp_bound_ok = false;
            if (m2 > b2) rep.h1_int_bound_ok = false;
        }
    }
    return rep;
}

double SpectrumSeries::energy_density() const {
    double s = 0.0;
    const double dk = kappa.size() > 1 ? kappa[1] - kappa[0] : 1.0;
    for (double v : e) s += v * dk;
    return s;
}

double SpectrumSeries::enstrophy_density() const {
    double s = 0.0;
    const double dk = kappa.size() > 1 ? kappa[1] - kappa[0] : 1.0;
    for (double v : z) s += v * dk;
    return s;
}

SpectrumSeries energy_spectrum(const VorticityState& w) {
    validate_state(w);
    const int n = w.grid.n;
    const double scale = w.grid.scale;
    const int c = w.grid.cutoff();
    const int n_shells =
        static_cast<int>(std::lround(std::sqrt(2.0) * c)) + 1;
    SpectrumSeries s;
    s.kappa.resize(n_shells);
    s.e.assign(n_shells, 0.0);
    s.z.assign(n_shells, 0.0);
    for (int i = 0; i < n_shells; ++i) s.kappa[i] = (i + 1) / scale;
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const double mm = m1 * m1 + m2 * m2;
            if (mm == 0.0) continue;
            const int shell = static_cast<int>(std::lround(std::sqrt(mm))) - 1;
            if (shell < 0 || shell >= n_shells) continue;
            const double p = std::norm(w.coeffs[static_cast<size_t>(i1) * n + i2]);
            // |u|^2 = scale^2 |w|^2 / |m|^2; densities are per unit area and
            // per unit kappa (shell width 1/scale).
            s.e[shell] += 0.5 * scale * scale * p / mm * scale;
            s.z[shell] += 0.5 * p * scale;
        }
    }
    s.n_states = 1;
    return s;
}

void SpectrumAccumulator::add(const VorticityState& w) {
    SpectrumSeries one = energy_spectrum(w);
    if (sum_.n_states == 0) {
        sum_ = std::move(one);
        return;
    }
    if (one.kappa.size() != sum_.kappa.size())
        throw std::invalid_argument("spectrum accumulator: shell mismatch");
    for (size_t i = 0; i < sum_.e.size(); ++i) {
        sum_.e[i] += one.e[i];
        sum_.z[i] += one.z[i];
    }
    ++sum_.n_states;
}

SpectrumSeries SpectrumAccumulator::series() const {
    SpectrumSeries out = sum_;
    if (out.n_states > 1) {
        for (auto& v : out.e) v /= out.n_states;
        for (auto& v : out.z) v /= out.n_states;
    }
    return out;
}

SlopeFit slope_fit(const SpectrumSeries& spec, double kappa_lo, double kappa_hi,
                   const SimConfig& cfg) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < spec.kappa.size(); ++i) {
        if (spec.kappa[i] < kappa_lo || spec.kappa[i] > kappa_hi) continue;
        if (spec.e[i] <= 0.0) continue;
        lx.push_back(std::log(spec.kappa[i]));
        ly.push_back(std::log(spec.e[i]));
    }
    if (lx.size() < 5)
        throw std::invalid_argument("slope_fit: fewer than 5 usable shells");
    const size_t m = lx.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double r = ly[i] - my - fit.slope * (lx[i] - mx);
        ss_res += r * r;
    }
    fit.stderr_slope = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
    fit.n_shells = static_cast<int>(m);
    fit.kappa_nu = std::pow(cfg.nu, -0.5) * std::pow(cfg.forcing.eps, 1.0 / 6.0);
    fit.kappa_tau = cfg.forcing.eps_prime > 0.0
                        ? std::pow(cfg.tau, 1.5) / std::sqrt(cfg.forcing.eps_prime)
                        : 0.0;
    return fit;
}

std::vector<CouplingRecord> coupling_distance(const SimConfig& cfg,
                                              const VorticityState& w0_a,
                                              const VorticityState& w0_b,
                                              double T, int cutoff) {
    cfg.validate();
    validate_state(w0_a);
    validate_state(w0_b);
    SimConfig run = cfg;
    run.t_end = T;

    VorticityState a = w0_a, b = w0_b;
    a.time = b.time = 0.0;
    const double dt = run.resolve_dt(w0_a);
    const auto n_steps =
        static_cast<std::uint64_t>(std::ceil(run.t_end / dt - 1e-9));
    Stepper stepper(run, dt);
    std::unique_ptr<NoiseSource> noise;
    if (run.forcing.modes.empty())
        noise = std::make_unique<ZeroNoise>(run.grid);
    else
        noise = std::make_unique<PhiloxNoise>(run.forcing, run.grid, dt,
                                              run.seed, 0);

    auto record = [&](std::vector<CouplingRecord>& out) {
        VorticityState diff = a;
        for (size_t i = 0; i < diff.coeffs.size(); ++i)
            diff.coeffs[i] -= b.coeffs[i];
        const VorticityState low = project_low(diff, cutoff);
        const double d2 = l2_norm_sq(diff);
        const double dl2 = l2_norm_sq(low);
        out.push_back({a.time, std::sqrt(d2), std::sqrt(dl2),
                       std::sqrt(std::max(0.0, d2 - dl2))});
    };

    std::vector<CouplingRecord> out;
    record(out);
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        const VorticityState incr = noise->increment(s);
        stepper.step(a, incr);
        stepper.step(b, incr);
        if ((s + 1) % static_cast<std::uint64_t>(run.output_every) == 0 ||
            s + 1 == n_steps)
            record(out);
    }
    return out;
}

}  // namespace vort2d
