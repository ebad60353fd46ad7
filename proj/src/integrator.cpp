#include "vort2d/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

namespace vort2d {

void SimConfig::validate() const {
    grid.validate();
    if (!(nu > 0.0)) throw std::invalid_argument("sim.nu must be positive");
    if (tau < 0.0) throw std::invalid_argument("sim.tau must be >= 0");
    if (dt < 0.0) throw std::invalid_argument("sim.dt must be >= 0");
    if (t_end < 0.0) throw std::invalid_argument("sim.t_end must be >= 0");
    if (output_every < 1)
        throw std::invalid_argument("sim.output_every must be >= 1");
    if (!(cfl > 0.0)) throw std::invalid_argument("sim.cfl must be positive");
}

double SimConfig::resolve_dt(const VorticityState& w0) const {
    if (dt > 0.0) return dt;
    const double kmax = grid.cutoff() / grid.scale;
    double uref = max_velocity(w0);
    if (!forcing.modes.empty())
        uref = std::max(uref, std::sqrt(forcing.eps_prime));
    uref = std::max(uref, 1e-3);
    return cfl / (uref * kmax);
}

namespace {
double phi1(double z) {
    if (z == 0.0) return 1.0;
    return std::expm1(z) / z;
}
}  // namespace

Stepper::Stepper(const SimConfig& cfg, double dt) : cfg_(cfg), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
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

void Stepper::step(VorticityState& w, const VorticityState& increment) const {
    if (cfg_.nonlinearity) {
        const VorticityState tend = nonlinear(w);
        for (size_t i = 0; i < w.coeffs.size(); ++i)
            w.coeffs[i] = decay_[i] * (w.coeffs[i] + increment.coeffs[i]) +
                          phi_dt_[i] * tend.coeffs[i];
    } else {
        for (size_t i = 0; i < w.coeffs.size(); ++i)
            w.coeffs[i] = decay_[i] * (w.coeffs[i] + increment.coeffs[i]);
    }
    enforce_invariants(w);
    w.time += dt_;
    for (const auto& c : w.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw BlowUpError("solution blew up at t = " + std::to_string(w.time));
}

void Stepper::step(VorticityState& w) const {
    const VorticityState zero(cfg_.grid);
    step(w, zero);
}

VorticityState step(const VorticityState& w, const SimConfig& cfg,
                    const VorticityState& increment) {
    cfg.validate();
    validate_state(w);
    if (increment.grid != w.grid)
        throw std::invalid_argument("step: increment grid mismatch");
    VorticityState out = w;
    Stepper(cfg, cfg.resolve_dt(w)).step(out, increment);
    return out;
}

namespace {

ObsRecord make_record(const VorticityState& w, double noise_qv, double h1_int) {
    const int n = w.grid.n;
    const double area = w.grid.area();
    const double inv_s2 = 1.0 / (w.grid.scale * w.grid.scale);
    double l2 = 0.0, h1 = 0.0, en = 0.0;
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const double mm = (m1 * m1 + m2 * m2) * inv_s2;
            const double p =
                std::norm(w.coeffs[static_cast<size_t>(i1) * n + i2]);
            l2 += p;
            h1 += mm * p;
            if (mm > 0.0) en += p / mm;
        }
    }
    return {w.time, 0.5 * area * l2, 0.5 * area * en, area * h1, noise_qv, h1_int};
}

}  // namespace

Trajectory simulate(const SimConfig& cfg, const VorticityState& w0,
                    NoiseSource& noise, const StateObserver& observer) {
    cfg.validate();
    validate_state(w0);
    if (w0.grid != cfg.grid)
        throw std::invalid_argument("simulate: initial state grid mismatch");

    VorticityState w = w0;
    w.time = 0.0;
    const double dt = cfg.resolve_dt(w0);
    const auto n_steps = static_cast<std::uint64_t>(
        std::ceil(cfg.t_end / dt - 1e-9));
    Stepper stepper(cfg, dt);

    Trajectory traj;
    double noise_qv = 0.0, h1_int = 0.0;
    ObsRecord rec = make_record(w, noise_qv, h1_int);
    traj.records.push_back(rec);
    if (observer) observer(w, 0);

    double prev_h1 = rec.h1_sq;
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        const VorticityState incr = noise.increment(s);
        noise_qv += l2_norm_sq(incr);
        stepper.step(w, incr);
        // Trapezoidal running integral of ||grad w||^2.
        const ObsRecord cur = make_record(w, noise_qv, h1_int);
        h1_int += 0.5 * dt * (prev_h1 + cur.h1_sq);
        prev_h1 = cur.h1_sq;
        if ((s + 1) % static_cast<std::uint64_t>(cfg.output_every) == 0 ||
            s + 1 == n_steps) {
            ObsRecord out = cur;
            out.h1_int = h1_int;
            traj.records.push_back(out);
            if (observer) observer(w, s + 1);
        }
    }
    traj.final_state = std::move(w);
    return traj;
}

Trajectory simulate(const SimConfig& cfg, std::optional<VorticityState> w0,
                    std::uint64_t trajectory, const StateObserver& observer) {
    cfg.validate();
    VorticityState init = w0 ? std::move(*w0) : VorticityState(cfg.grid);
    const double dt = cfg.resolve_dt(init);
    if (cfg.forcing.modes.empty()) {
        ZeroNoise noise(cfg.grid);
        return simulate(cfg, init, noise, observer);
    }
    PhiloxNoise noise(cfg.forcing, cfg.grid, dt, cfg.seed, trajectory);
    return simulate(cfg, init, noise, observer);
}

std::vector<Trajectory> run_ensemble(const SimConfig& cfg,
                                     const VorticityState& w0, int members,
                                     int threads) {
    if (members < 1) throw std::invalid_argument("ensemble: members < 1");
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Trajectory> out(members);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < members; i = next.fetch_add(1))
            out[i] = simulate(cfg, w0, static_cast<std::uint64_t>(i));
    };
    std::vector<std::thread> pool;
    const int nw = std::min(threads, members);
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

// --- snapshot files ----------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'V', 'O', 'R', 'T'};
constexpr std::uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

static_assert(sizeof(double) == 8);
}  // namespace

void checkpoint_save(const VorticityState& w, const std::string& path) {
    validate_state(w);
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw CheckpointError("cannot open for writing: " + path);
    const std::uint32_t n = static_cast<std::uint32_t>(w.grid.n);
    bool ok = std::fwrite(kMagic, 1, 4, f.get()) == 4 &&
              std::fwrite(&kVersion, 4, 1, f.get()) == 1 &&
              std::fwrite(&n, 4, 1, f.get()) == 1 &&
              std::fwrite(&w.grid.scale, 8, 1, f.get()) == 1 &&
              std::fwrite(&w.time, 8, 1, f.get()) == 1 &&
              std::fwrite(w.coeffs.data(), 16, w.coeffs.size(), f.get()) ==
                  w.coeffs.size();
    if (!ok) throw CheckpointError("short write: " + path);
}

VorticityState checkpoint_load(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw CheckpointError("cannot open: " + path);
    char magic[4];
    std::uint32_t version = 0, n = 0;
    if (std::fread(magic, 1, 4, f.get()) != 4 ||
        std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointError("bad magic in " + path);
    if (std::fread(&version, 4, 1, f.get()) != 1 || version != kVersion)
        throw CheckpointError("unsupported snapshot version in " + path);
    if (std::fread(&n, 4, 1, f.get()) != 1 || n < 8 || n % 2 != 0 || n > 1u << 16)
        throw CheckpointError("bad lattice size in " + path);
    GridSpec g;
    g.n = static_cast<int>(n);
    VorticityState w(g);
    if (std::fread(&w.grid.scale, 8, 1, f.get()) != 1 ||
        std::fread(&w.time, 8, 1, f.get()) != 1 ||
        std::fread(w.coeffs.data(), 16, w.coeffs.size(), f.get()) !=
            w.coeffs.size())
        throw CheckpointError("truncated snapshot: " + path);
    char extra;
    if (std::fread(&extra, 1, 1, f.get()) == 1)
        throw CheckpointError("trailing bytes in snapshot: " + path);
    return w;
}

}  // namespace vort2d
