#include "vort2d/malliavin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

namespace vort2d {

GalerkinBasis::GalerkinBasis(const GridSpec& grid, int cutoff)
    : grid_(grid), cutoff_(cutoff) {
    if (cutoff < 1) throw std::invalid_argument("GalerkinBasis: cutoff < 1");
    if (cutoff > grid.cutoff())
        throw std::invalid_argument("GalerkinBasis: cutoff exceeds dealias range");
    const long cut2 = static_cast<long>(cutoff) * cutoff;
    for (int m1 = -cutoff; m1 <= cutoff; ++m1)
        for (int m2 = -cutoff; m2 <= cutoff; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            if (static_cast<long>(m1) * m1 + static_cast<long>(m2) * m2 > cut2)
                continue;
            modes_.push_back({m1, m2});
        }
    std::sort(modes_.begin(), modes_.end(),
              [](const std::array<int, 2>& a, const std::array<int, 2>& b) {
                  const long la = long(a[0]) * a[0] + long(a[1]) * a[1];
                  const long lb = long(b[0]) * b[0] + long(b[1]) * b[1];
                  return std::tie(la, a[0], a[1]) < std::tie(lb, b[0], b[1]);
              });
}

std::vector<int> GalerkinBasis::low_indices(int low_cutoff) const {
    std::vector<int> idx;
    const long cut2 = static_cast<long>(low_cutoff) * low_cutoff;
    for (int i = 0; i < size(); ++i) {
        const auto& m = modes_[i];
        if (long(m[0]) * m[0] + long(m[1]) * m[1] <= cut2) idx.push_back(i);
    }
    return idx;
}

Eigen::VectorXd GalerkinBasis::project(const VorticityState& w) const {
    Eigen::VectorXd x(size());
    for (int i = 0; i < size(); ++i)
        x[i] = basis_project(w, modes_[i][0], modes_[i][1]);
    return x;
}

VorticityState GalerkinBasis::embed(const Eigen::VectorXd& x) const {
    VorticityState w(grid_);
    for (int i = 0; i < size(); ++i)
        basis_inject(w, modes_[i][0], modes_[i][1], x[i]);
    return w;
}

Eigen::MatrixXd assemble_matrix(const FrozenPath& path, const ForcingSpec& spec,
                                const GalerkinBasis& basis, int threads) {
    const int ng = basis.size();
    const int d = spec.dim();
    const int steps = path.n_steps;
    TangentOps ops(path.cfg, path.dt);

    // One adjoint sweep per basis direction; rows of R are the discrete
    // A* images, flattened over (substep, direction).
    Eigen::MatrixXd R(ng, static_cast<Eigen::Index>(steps) * d);
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int a = next.fetch_add(1); a < ng; a = next.fetch_add(1)) {
            const auto& m = basis.mode(a);
            VorticityState eta(path.cfg.grid);
            basis_inject(eta, m[0], m[1], 1.0);
            const auto rec = ops.adjoint_record(path, spec, std::move(eta));
            for (int s = 0; s < steps; ++s)
                for (int j = 0; j < d; ++j)
                    R(a, static_cast<Eigen::Index>(s) * d + j) = rec[s][j];
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(threads, ng);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    Eigen::MatrixXd M = path.dt * (R * R.transpose());
    M = 0.5 * (M + M.transpose()).eval();
    return M;
}

namespace {

void check_psd(const Eigen::MatrixXd& M) {
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("cone_min: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    const double tr = std::max(M.trace(), 1e-300);
    if (es.eigenvalues().minCoeff() < -1e-10 * tr)
        throw std::invalid_argument("cone_min: matrix not PSD within tolerance");
}

}  // namespace

ConeMinResult cone_min(const Eigen::MatrixXd& M,
                       const std::vector<int>& low_indices, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("cone_min: alpha must be in (0,1)");
    if (low_indices.empty())
        throw std::invalid_argument("cone_min: empty projection");
    check_psd(M);
    const Eigen::Index n = M.rows();
    Eigen::VectorXd pdiag = Eigen::VectorXd::Zero(n);
    for (int i : low_indices) pdiag[i] = 1.0;
    // C = P - alpha^2 I as a diagonal.
    const Eigen::VectorXd cdiag = pdiag.array() - alpha * alpha;

    auto lambda_min = [&](double mu, Eigen::VectorXd* vec) {
        Eigen::MatrixXd H = M;
        H.diagonal() -= mu * cdiag;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            H, vec ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (vec) *vec = es.eigenvectors().col(0);
        return es.eigenvalues()[0];
    };

    // Interior candidate: smallest eigenpair of M itself. With a degenerate
    // bottom eigenspace, the cone test is whether the best projection onto P
    // within the eigenspace reaches alpha^2.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const double lam0 = es.eigenvalues()[0];
    {
        const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        std::vector<Eigen::Index> space;
        for (Eigen::Index i = 0; i < n; ++i)
            if (es.eigenvalues()[i] <= lam0 + tol) space.push_back(i);
        Eigen::MatrixXd V(n, static_cast<Eigen::Index>(space.size()));
        for (size_t i = 0; i < space.size(); ++i) V.col(i) = es.eigenvectors().col(space[i]);
        Eigen::MatrixXd G = V.transpose() * pdiag.asDiagonal() * V;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(G);
        if (gs.eigenvalues().maxCoeff() >= alpha * alpha - 1e-13) {
            ConeMinResult res;
            res.value = lam0;
            res.mu = 0.0;
            res.interior = true;
            res.minimizer = V * gs.eigenvectors().col(G.rows() - 1);
            return res;
        }
    }

    // Dual: maximize the concave function f(mu) = lambda_min(M - mu C) by
    // golden-section search after bracketing the peak.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = std::max(1.0, M.cwiseAbs().maxCoeff());
    double f_lo = lambda_min(lo, nullptr);
    while (true) {
        const double f_hi = lambda_min(hi, nullptr);
        if (f_hi < f_lo || hi > 1e18) break;
        hi *= 4.0;
    }
    double a = lo, b = hi;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = lambda_min(c1, nullptr), f2 = lambda_min(c2, nullptr);
    for (int it = 0; it < 220 && (b - a) > 1e-14 * (1.0 + b); ++it) {
        if (f1 < f2) {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = lambda_min(c2, nullptr);
        } else {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = lambda_min(c1, nullptr);
        }
    }
    ConeMinResult res;
    res.mu = 0.5 * (a + b);
    Eigen::VectorXd vec;
    res.value = lambda_min(res.mu, &vec);
    res.minimizer = vec;
    res.interior = false;

    // Cross-check: the dual value can never exceed a sampled cone direction.
    {
        CounterRng rng(0x636f6e65u, 17);
        double best = std::numeric_limits<double>::infinity();
        Eigen::VectorXd u(n);
        for (int s = 0; s < 512; ++s) {
            for (Eigen::Index i = 0; i < n; i += 2) {
                const auto z = rng.normal_pair(s, i);
                u[i] = z[0];
                if (i + 1 < n) u[i + 1] = z[1];
            }
            Eigen::VectorXd pu = pdiag.asDiagonal() * u;
            Eigen::VectorXd qu = u - pu;
            const double np = pu.norm(), nq = qu.norm();
            if (np == 0.0) continue;
            // Place the sample on the cone boundary.
            Eigen::VectorXd x = alpha * pu / np;
            if (nq > 0.0) x += std::sqrt(1.0 - alpha * alpha) * qu / nq;
            best = std::min(best, x.dot(M * x) / x.squaredNorm());
            best = std::min(best, pu.dot(M * pu) / pu.squaredNorm());
        }
        if (res.value > best + 1e-8 * (1.0 + std::abs(best)))
            throw std::runtime_error("cone_min: dual exceeded sampled upper bound");
    }
    return res;
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const size_t i = static_cast<size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double w = pos - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

}  // namespace

SurveyResult nondegeneracy_survey(const SimConfig& cfg, const SurveyConfig& scfg) {
    cfg.validate();
    if (scfg.samples < 1) throw std::invalid_argument("survey: samples < 1");
    if (scfg.galerkin_cutoff < scfg.low_cutoff)
        throw std::invalid_argument("survey: galerkin cutoff below low cutoff");
    SurveyResult out;
    out.config = scfg;
    GalerkinBasis basis(cfg.grid, scfg.galerkin_cutoff);
    const auto low = basis.low_indices(scfg.low_cutoff);
    const double dt_int = scfg.interval / scfg.quad_substeps;

    for (int s = 0; s < scfg.samples; ++s) {
        // Fresh noise stream per sample; initial data from a burned-in run.
        VorticityState w0(cfg.grid);
        if (scfg.burn_in > 0.0) {
            SimConfig warm = cfg;
            warm.t_end = scfg.burn_in;
            warm.output_every = 1 << 30;
            w0 = simulate(warm, std::nullopt, 2 * s).final_state;
        }
        std::unique_ptr<NoiseSource> noise;
        if (cfg.forcing.modes.empty())
            noise = std::make_unique<ZeroNoise>(cfg.grid);
        else
            noise = std::make_unique<PhiloxNoise>(cfg.forcing, cfg.grid, dt_int,
                                                  cfg.seed, 2 * s + 1);
        FrozenPath path =
            freeze_path(cfg, w0, *noise, scfg.quad_substeps, dt_int);
        const Eigen::MatrixXd M = assemble_matrix(path, cfg.forcing, basis);
        const auto cm = cone_min(M, low, scfg.alpha);
        out.samples.push_back({cm.value, l2_norm(w0)});
    }

    std::vector<double> vals;
    for (const auto& s : out.samples) vals.push_back(s.cone_min);
    out.median = quantile(vals, 0.5);
    out.q10 = quantile(vals, 0.1);
    out.q90 = quantile(vals, 0.9);

    // Empirical lower-tail exponent: slope of log ecdf vs log value over the
    // smallest quartile (requires positive values; else reported as 0).
    std::sort(vals.begin(), vals.end());
    std::vector<double> lx, ly;
    for (size_t i = 0; i < vals.size() / 4; ++i) {
        if (vals[i] <= 0.0) continue;
        lx.push_back(std::log(vals[i]));
        ly.push_back(std::log((i + 1.0) / vals.size()));
    }
    if (lx.size() >= 3) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        if (sxx > 0) out.tail_exponent = sxy / sxx;
    }
    return out;
}

ControlRun control_run(const SimConfig& cfg, const VorticityState& xi0,
                       double lambda, int cutoff, int n_intervals,
                       int substeps_per_interval, std::uint64_t noise_stream) {
    cfg.validate();
    validate_state(xi0);
    if (!(lambda > 0.0)) throw std::invalid_argument("control_run: lambda <= 0");
    if (l2_norm(xi0) == 0.0)
        throw std::invalid_argument("control_run: zero initial perturbation");
    if (cfg.forcing.modes.empty())
        throw std::invalid_argument("control_run: forcing required");

    ControlRun run;
    run.lambda = lambda;
    run.cutoff = cutoff;
    run.rho0_norm = l2_norm(xi0);

    GalerkinBasis basis(cfg.grid, cutoff);
    const double dt_int = 1.0 / substeps_per_interval;
    TangentOps ops(cfg, dt_int);
    PhiloxNoise noise(cfg.forcing, cfg.grid, dt_int, cfg.seed, noise_stream);

    // Noise is addressed by global substep index so the base path is one
    // continuous trajectory across intervals.
    struct OffsetNoise : NoiseSource {
        PhiloxNoise* base;
        std::uint64_t offset;
        VorticityState increment(std::uint64_t step) override {
            return base->increment(offset + step);
        }
    };

    VorticityState w = VorticityState(cfg.grid);
    VorticityState rho = xi0;
    for (int n = 0; n < n_intervals; ++n) {
        OffsetNoise on;
        on.base = &noise;
        on.offset = static_cast<std::uint64_t>(n) * substeps_per_interval;
        FrozenPath path = freeze_path(cfg, w, on, substeps_per_interval, dt_int);

        ControlIntervalRecord rec;
        rec.n = n;
        if (n % 2 == 0) {
            // Controlled interval: v = A*(M+lambda)^{-1} pi_g J rho.
            const VorticityState jrho = ops.forward_sweep(path, rho);
            const Eigen::MatrixXd M = assemble_matrix(path, cfg.forcing, basis);
            const Eigen::VectorXd y = basis.project(jrho);
            Eigen::LDLT<Eigen::MatrixXd> solver(
                M + lambda * Eigen::MatrixXd::Identity(M.rows(), M.cols()));
            if (solver.info() != Eigen::Success)
                throw std::runtime_error("control_run: singular regularized solve");
            const Eigen::VectorXd c = solver.solve(y);

            ControlSignal ctl;
            ctl.spec = &cfg.forcing;
            ctl.values = ops.adjoint_record(path, cfg.forcing, basis.embed(c));
            rec.control_energy = ctl.energy(dt_int);

            ctl.sign = -1.0;  // rho = xi - zeta evolves with -Q v
            rho = ops.forward_sweep(path, std::move(rho), &ctl);

            // Galerkin identity: pi_g rho(n+1) = lambda (M+lambda)^{-1} y.
            const Eigen::VectorXd expect = y - M * c;
            rec.identity_residual = (basis.project(rho) - expect).norm();
        } else {
            rho = ops.forward_sweep(path, std::move(rho));
        }
        rec.rho_norm = l2_norm(rho);
        rec.rho_low_norm = l2_norm(project_low(rho, cutoff));
        run.records.push_back(rec);
        w = path.w_end;
    }
    return run;
}

}  // namespace vort2d
