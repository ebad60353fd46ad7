#include "vort2d/tangent.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vort2d {

namespace {

double phi1(double z) {
    if (z == 0.0) return 1.0;
    return std::expm1(z) / z;
}

// Physical-space velocity components of w (real parts).
void cache_velocity(const VorticityState& w, std::vector<double>& u,
                    std::vector<double>& v) {
    const int n = w.grid.n;
    const auto& fft = fft_for(n);
    std::vector<cplx> cu(w.coeffs.size()), cv(w.coeffs.size());
    const double s = w.grid.scale;
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const double mm = m1 * m1 + m2 * m2;
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            if (mm == 0.0) {
                cu[idx] = cv[idx] = 0.0;
                continue;
            }
            const cplx f = cplx(0.0, s / mm) * w.coeffs[idx];
            cu[idx] = f * m2;
            cv[idx] = -f * m1;
        }
    }
    fft.synthesis(cu);
    fft.synthesis(cv);
    u.resize(cu.size());
    v.resize(cv.size());
    for (size_t i = 0; i < cu.size(); ++i) {
        u[i] = cu[i].real();
        v[i] = cv[i].real();
    }
}

}  // namespace

FrozenPath freeze_path(const SimConfig& cfg, const VorticityState& w0,
                       NoiseSource& noise, int n_steps, double dt,
                       bool store_noise) {
    cfg.validate();
    validate_state(w0);
    if (n_steps < 0) throw std::invalid_argument("freeze_path: n_steps < 0");
    FrozenPath path;
    path.cfg = cfg;
    path.dt = dt;
    path.t_start = w0.time;
    path.n_steps = n_steps;
    path.w_begin = w0;

    Stepper stepper(cfg, dt);
    VorticityState w = w0;
    if (cfg.nonlinearity) {
        path.u_phys.resize(n_steps);
        path.v_phys.resize(n_steps);
    }
    for (int m = 0; m < n_steps; ++m) {
        if (cfg.nonlinearity)
            cache_velocity(w, path.u_phys[m], path.v_phys[m]);
        VorticityState incr = noise.increment(static_cast<std::uint64_t>(m));
        stepper.step(w, incr);
        if (store_noise) path.noise.push_back(std::move(incr));
    }
    path.w_end = std::move(w);
    return path;
}

double ControlSignal::energy(double dt) const {
    double e = 0.0;
    for (const auto& v : values)
        e += dt * std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    return e;
}

TangentOps::TangentOps(const SimConfig& cfg, double dt) : cfg_(cfg), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("TangentOps: dt <= 0");
    const int n = cfg.grid.n;
    decay_.resize(static_cast<size_t>(n) * n);
    phi_dt_.resize(decay_.size());
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = mode_of_index(i2, n);
            const double z = -cfg.damping(m1, m2) * dt;
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            decay_[idx] = std::exp(z);
            phi_dt_[idx] = dt * phi1(z);
        }
    }
}

// Directional derivative of the dealiased tendency at the frozen state:
// DN(xi) = [m1 m2 dB + (m1^2-m2^2) dA]/s^2 with dA = U vx + V ux,
// dB = 2(V vx - U ux), (ux, vx) the velocity of xi.
void TangentOps::bilinear(const FrozenPath& path, int step,
                          const VorticityState& in, VorticityState& out) const {
    const int n = cfg_.grid.n;
    const auto& fft = fft_for(n);
    std::vector<double> ux, vx;
    cache_velocity(in, ux, vx);
    const auto& U = path.u_phys[step];
    const auto& V = path.v_phys[step];
    std::vector<cplx> da(in.coeffs.size()), db(in.coeffs.size());
    for (size_t i = 0; i < da.size(); ++i) {
        da[i] = U[i] * vx[i] + V[i] * ux[i];
        db[i] = 2.0 * (V[i] * vx[i] - U[i] * ux[i]);
    }
    fft.analysis(da);
    fft.analysis(db);
    const double inv_s2 = 1.0 / (cfg_.grid.scale * cfg_.grid.scale);
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            out.coeffs[idx] =
                (m1 * m2 * db[idx] + (m1 * m1 - m2 * m2) * da[idx]) * inv_s2;
        }
    }
    dealias(out.coeffs, cfg_.grid);
    hermitianize(out.coeffs, n);
}

// Exact discrete transpose of bilinear():
// DN*(eta) = A1* F[-2U b + V a] + A2* F[2V b + U a], with a, b the synthesized
// images of the derivative multipliers applied to the (projected) input.
void TangentOps::bilinear_adjoint(const FrozenPath& path, int step,
                                  const VorticityState& in,
                                  VorticityState& out) const {
    const int n = cfg_.grid.n;
    const auto& fft = fft_for(n);
    const double inv_s2 = 1.0 / (cfg_.grid.scale * cfg_.grid.scale);
    std::vector<cplx> a(in.coeffs.size()), b(in.coeffs.size());
    {
        std::vector<cplx> proj = in.coeffs;
        dealias(proj, cfg_.grid);
        hermitianize(proj, n);
        for (int i1 = 0; i1 < n; ++i1) {
            const double m1 = mode_of_index(i1, n);
            for (int i2 = 0; i2 < n; ++i2) {
                const double m2 = mode_of_index(i2, n);
                const size_t idx = static_cast<size_t>(i1) * n + i2;
                a[idx] = (m1 * m1 - m2 * m2) * inv_s2 * proj[idx];
                b[idx] = m1 * m2 * inv_s2 * proj[idx];
            }
        }
    }
    fft.synthesis(a);
    fft.synthesis(b);
    const auto& U = path.u_phys[step];
    const auto& V = path.v_phys[step];
    std::vector<cplx> g1(a.size()), g2(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double av = a[i].real(), bv = b[i].real();
        g1[i] = -2.0 * U[i] * bv + V[i] * av;
        g2[i] = 2.0 * V[i] * bv + U[i] * av;
    }
    fft.analysis(g1);
    fft.analysis(g2);
    const double s = cfg_.grid.scale;
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const double mm = m1 * m1 + m2 * m2;
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            if (mm == 0.0) {
                out.coeffs[idx] = 0.0;
                continue;
            }
            // A1* = -i s m2/|m|^2, A2* = +i s m1/|m|^2.
            out.coeffs[idx] = cplx(0.0, s / mm) * (m1 * g2[idx] - m2 * g1[idx]);
        }
    }
    dealias(out.coeffs, cfg_.grid);
    hermitianize(out.coeffs, n);
}

void TangentOps::forward_step(const FrozenPath& path, int step,
                              VorticityState& xi,
                              const ControlSignal* control) const {
    if (cfg_.nonlinearity) {
        VorticityState tend(cfg_.grid);
        bilinear(path, step, xi, tend);
        for (size_t i = 0; i < xi.coeffs.size(); ++i)
            xi.coeffs[i] =
                decay_[i] * xi.coeffs[i] + phi_dt_[i] * tend.coeffs[i];
    } else {
        for (size_t i = 0; i < xi.coeffs.size(); ++i)
            xi.coeffs[i] *= decay_[i];
    }
    if (control) {
        const auto& v = control->values[step];
        const auto& modes = control->spec->modes;
        for (size_t j = 0; j < modes.size(); ++j) {
            const size_t idx =
                static_cast<size_t>(index_of_mode(modes[j].k1, cfg_.grid.n)) *
                    cfg_.grid.n +
                index_of_mode(modes[j].k2, cfg_.grid.n);
            basis_inject(xi, modes[j].k1, modes[j].k2,
                         control->sign * phi_dt_[idx] * modes[j].gamma * v[j]);
        }
    }
    enforce_invariants(xi);
    xi.time += dt_;
}

void TangentOps::adjoint_step(const FrozenPath& path, int step,
                              VorticityState& eta) const {
    if (cfg_.nonlinearity) {
        VorticityState weighted(cfg_.grid);
        for (size_t i = 0; i < eta.coeffs.size(); ++i)
            weighted.coeffs[i] = phi_dt_[i] * eta.coeffs[i];
        VorticityState tend(cfg_.grid);
        bilinear_adjoint(path, step, weighted, tend);
        for (size_t i = 0; i < eta.coeffs.size(); ++i)
            eta.coeffs[i] = decay_[i] * eta.coeffs[i] + tend.coeffs[i];
    } else {
        for (size_t i = 0; i < eta.coeffs.size(); ++i)
            eta.coeffs[i] *= decay_[i];
    }
    enforce_invariants(eta);
}

VorticityState TangentOps::forward_sweep(const FrozenPath& path,
                                         VorticityState xi,
                                         const ControlSignal* control,
                                         int first, int last) const {
    if (last < 0) last = path.n_steps;
    if (control && static_cast<int>(control->values.size()) < last)
        throw std::invalid_argument("forward_sweep: control shorter than path");
    for (int m = first; m < last; ++m) forward_step(path, m, xi, control);
    return xi;
}

VorticityState TangentOps::adjoint_sweep(const FrozenPath& path,
                                         VorticityState eta, int first,
                                         int last) const {
    if (last < 0) last = path.n_steps;
    for (int m = last - 1; m >= first; --m) adjoint_step(path, m, eta);
    return eta;
}

std::vector<std::vector<double>> TangentOps::adjoint_record(
    const FrozenPath& path, const ForcingSpec& spec, VorticityState eta) const {
    std::vector<std::vector<double>> rec(
        path.n_steps, std::vector<double>(spec.modes.size(), 0.0));
    for (int m = path.n_steps - 1; m >= 0; --m) {
        for (size_t j = 0; j < spec.modes.size(); ++j) {
            const auto& mode = spec.modes[j];
            const size_t idx =
                static_cast<size_t>(index_of_mode(mode.k1, cfg_.grid.n)) *
                    cfg_.grid.n +
                index_of_mode(mode.k2, cfg_.grid.n);
            rec[m][j] = mode.gamma * (phi_dt_[idx] / dt_) *
                        basis_project(eta, mode.k1, mode.k2);
        }
        adjoint_step(path, m, eta);
    }
    return rec;
}

double basis_project(const VorticityState& w, int k1, int k2) {
    return real_coord(w, k1, k2) * std::sqrt(0.5 * w.grid.area());
}

void basis_inject(VorticityState& w, int k1, int k2, double amount) {
    add_real_coord(w, k1, k2, amount * std::sqrt(2.0 / w.grid.area()));
}

double min_damping_above(const SimConfig& cfg, int cutoff) {
    const int c = cfg.grid.cutoff();
    const long cut2 = static_cast<long>(cutoff) * cutoff;
    double best = -1.0;
    for (int m1 = -c; m1 <= c; ++m1)
        for (int m2 = -c; m2 <= c; ++m2) {
            const long mm = static_cast<long>(m1) * m1 + static_cast<long>(m2) * m2;
            if (mm <= cut2) continue;
            const double a = cfg.damping(m1, m2);
            if (best < 0.0 || a < best) best = a;
        }
    if (best < 0.0)
        throw std::invalid_argument("min_damping_above: cutoff covers all modes");
    return best;
}

namespace {

VorticityState project_high(const VorticityState& w, int cutoff) {
    VorticityState low = project_low(w, cutoff);
    VorticityState out = w;
    for (size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] -= low.coeffs[i];
    return out;
}

struct PowerResult {
    double sigma = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Largest singular value of the map xi -> post(J (pre(xi))) by power
// iteration on the normal operator. Converged means the Rayleigh estimate
// moved by less than tol (relative) over three consecutive iterations.
PowerResult power_norm(const TangentOps& ops, const FrozenPath& path,
                       int cutoff, bool project_output,
                       const VorticityState& start, double tol) {
    VorticityState v = project_output ? start : project_high(start, cutoff);
    double nv = l2_norm(v);
    if (nv == 0.0) return {};
    for (auto& c : v.coeffs) c /= nv;
    double sigma2 = 0.0;
    int plateau = 0;
    PowerResult res;
    constexpr int kMaxIter = 1000;
    for (int it = 0; it < kMaxIter; ++it) {
        VorticityState y = ops.forward_sweep(path, v);
        if (project_output) y = project_high(y, cutoff);
        const double s2 = l2_norm_sq(y);
        VorticityState z = ops.adjoint_sweep(path, std::move(y));
        if (!project_output) z = project_high(z, cutoff);
        const double nz = l2_norm(z);
        res.iterations = it + 1;
        if (nz == 0.0) {
            res.sigma = 0.0;
            res.converged = true;
            return res;
        }
        for (auto& c : z.coeffs) c /= nz;
        v = std::move(z);
        plateau = (it > 0 && std::abs(s2 - sigma2) <= tol * s2) ? plateau + 1 : 0;
        sigma2 = s2;
        if (plateau >= 3) {
            res.sigma = std::sqrt(s2);
            res.converged = true;
            return res;
        }
    }
    res.sigma = std::sqrt(sigma2);
    return res;
}

}  // namespace

ContractionStat contraction_stat(const SimConfig& cfg, const VorticityState& w0,
                                 int cutoff, double T, double p, int samples,
                                 std::uint64_t seed_offset, double rayleigh_tol) {
    if (samples < 1) throw std::invalid_argument("contraction_stat: samples < 1");
    if (p < 1.0) throw std::invalid_argument("contraction_stat: p < 1");
    ContractionStat stat;
    stat.cutoff = cutoff;
    stat.T = T;
    stat.p = p;
    stat.diagonal_prediction = std::exp(-min_damping_above(cfg, cutoff) * T);

    const double dt = cfg.resolve_dt(w0);
    const int n_steps = std::max(1, static_cast<int>(std::llround(T / dt)));
    TangentOps ops(cfg, T / n_steps);

    for (int s = 0; s < samples; ++s) {
        std::unique_ptr<NoiseSource> noise;
        if (cfg.forcing.modes.empty())
            noise = std::make_unique<ZeroNoise>(cfg.grid);
        else
            noise = std::make_unique<PhiloxNoise>(cfg.forcing, cfg.grid,
                                                  T / n_steps, cfg.seed,
                                                  seed_offset + s);
        FrozenPath path = freeze_path(cfg, w0, *noise, n_steps, T / n_steps);
        const VorticityState start =
            random_state(cfg.grid, cfg.seed * 7919u + s + 1, 0.5);
        const auto out = power_norm(ops, path, cutoff, true, start, rayleigh_tol);
        const auto in = power_norm(ops, path, cutoff, false, start, rayleigh_tol);
        stat.samples.push_back(
            {out.sigma, in.sigma, out.converged && in.converged,
             out.iterations + in.iterations});
    }

    auto summarize = [&](auto get, double& mean, double& lo, double& hi) {
        double m = 0.0;
        for (const auto& s : stat.samples) m += std::pow(get(s), p);
        m /= stat.samples.size();
        double var = 0.0;
        for (const auto& s : stat.samples) {
            const double d = std::pow(get(s), p) - m;
            var += d * d;
        }
        var = stat.samples.size() > 1 ? var / (stat.samples.size() - 1) : 0.0;
        const double half =
            1.96 * std::sqrt(var / static_cast<double>(stat.samples.size()));
        mean = m;
        lo = m - half;
        hi = m + half;
    };
    summarize([](const ContractionSample& s) { return s.norm_out; },
              stat.mean_out, stat.ci_lo_out, stat.ci_hi_out);
    summarize([](const ContractionSample& s) { return s.norm_in; },
              stat.mean_in, stat.ci_lo_in, stat.ci_hi_in);
    return stat;
}

}  // namespace vort2d
