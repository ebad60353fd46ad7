#include "vort2d/grid_spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vort2d/rng.hpp"

namespace vort2d {

void GridSpec::validate() const {
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("grid.n must be even and >= 8");
    if (!(scale > 0.0))
        throw std::invalid_argument("grid.scale must be positive");
    const int c = cutoff();
    if (c < 2) throw std::invalid_argument("dealias cutoff must be >= 2");
    if (c > n / 2 - 1)
        throw std::invalid_argument("dealias cutoff must leave the Nyquist row empty");
}

void hermitianize(std::vector<cplx>& c, int n) {
    // Pair (i1,i2) with (-i1,-i2); average so c(-m) = conj(c(m)) exactly.
    for (int i1 = 0; i1 < n; ++i1) {
        const int j1 = (n - i1) % n;
        for (int i2 = 0; i2 < n; ++i2) {
            const int j2 = (n - i2) % n;
            const size_t a = static_cast<size_t>(i1) * n + i2;
            const size_t b = static_cast<size_t>(j1) * n + j2;
            if (a < b) {
                const cplx avg = 0.5 * (c[a] + std::conj(c[b]));
                c[a] = avg;
                c[b] = std::conj(avg);
            } else if (a == b) {
                c[a] = cplx(c[a].real(), 0.0);  // self-paired mode is real
            }
        }
    }
    c[0] = 0.0;
    // The Nyquist row m = n/2 has no conjugate partner on the lattice.
    for (int i = 0; i < n; ++i) {
        c[static_cast<size_t>(n / 2) * n + i] = 0.0;
        c[static_cast<size_t>(i) * n + n / 2] = 0.0;
    }
}

void dealias(std::vector<cplx>& c, const GridSpec& g) {
    const int n = g.n;
    const int cut = g.cutoff();
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = mode_of_index(i1, n);
        const bool kill_row = std::abs(m1) > cut;
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = mode_of_index(i2, n);
            if (kill_row || std::abs(m2) > cut)
                c[static_cast<size_t>(i1) * n + i2] = 0.0;
        }
    }
}

void enforce_invariants(VorticityState& w) {
    dealias(w.coeffs, w.grid);
    hermitianize(w.coeffs, w.grid.n);
}

void validate_state(const VorticityState& w) {
    w.grid.validate();
    if (w.coeffs.size() != static_cast<size_t>(w.grid.size()))
        throw std::invalid_argument("state: coefficient array size mismatch");
    const int n = w.grid.n;
    const int cut = w.grid.cutoff();
    double scale2 = 0.0;
    for (const auto& v : w.coeffs) scale2 += std::norm(v);
    const double tol = 1e-12 * std::sqrt(scale2) + 1e-300;
    if (std::abs(w.coeffs[0]) > tol)
        throw std::invalid_argument("state: mean mode is nonzero");
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = mode_of_index(i2, n);
            const cplx v = w.coeffs[static_cast<size_t>(i1) * n + i2];
            if ((std::abs(m1) > cut || std::abs(m2) > cut) && v != 0.0)
                throw std::invalid_argument("state: mode beyond dealias cutoff");
            const cplx mirror = w.at(-m1, -m2);
            if (std::abs(mirror - std::conj(v)) > tol)
                throw std::invalid_argument("state: Hermitian symmetry broken");
        }
    }
}

double inner(const VorticityState& a, const VorticityState& b) {
    if (a.grid != b.grid) throw std::invalid_argument("inner: grid mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.coeffs.size(); ++i)
        s += a.coeffs[i].real() * b.coeffs[i].real() +
             a.coeffs[i].imag() * b.coeffs[i].imag();
    return a.grid.area() * s;
}

double l2_norm_sq(const VorticityState& a) {
    double s = 0.0;
    for (const auto& v : a.coeffs) s += std::norm(v);
    return a.grid.area() * s;
}

double l2_norm(const VorticityState& a) { return std::sqrt(l2_norm_sq(a)); }

bool in_upper_half(int k1, int k2) { return k2 > 0 || (k2 == 0 && k1 > 0); }

double real_coord(const VorticityState& w, int k1, int k2) {
    // For k in Z+: w(k) = w_{-k}/2 - i w_k/2 with w_k the sin coefficient
    // and w_{-k} the cos coefficient.
    if (in_upper_half(k1, k2)) return -2.0 * w.at(k1, k2).imag();
    return 2.0 * w.at(-k1, -k2).real();
}

void add_real_coord(VorticityState& w, int k1, int k2, double a) {
    if (in_upper_half(k1, k2)) {  // sin(k.x)
        w.at(k1, k2) += cplx(0.0, -0.5 * a);
        w.at(-k1, -k2) += cplx(0.0, 0.5 * a);
    } else {  // cos(k.x), k = -(k1,k2) in Z+
        w.at(k1, k2) += cplx(0.5 * a, 0.0);
        w.at(-k1, -k2) += cplx(0.5 * a, 0.0);
    }
}

VorticityState unit_basis_field(const GridSpec& g, int k1, int k2) {
    VorticityState e(g);
    // ||e_k||^2 = area/2, so the unit field is e_k * sqrt(2/area).
    add_real_coord(e, k1, k2, std::sqrt(2.0 / g.area()));
    return e;
}

namespace {

// Spectral velocity components from vorticity coefficients (integer-mode
// form of i(k2,-k1)/|k|^2 at k = m/scale).
void velocity_coeffs(const VorticityState& w, std::vector<cplx>& u1,
                     std::vector<cplx>& u2) {
    const int n = w.grid.n;
    const double s = w.grid.scale;
    u1.assign(w.coeffs.size(), cplx(0.0));
    u2.assign(w.coeffs.size(), cplx(0.0));
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = mode_of_index(i2, n);
            const double mm2 = double(m1) * m1 + double(m2) * m2;
            if (mm2 == 0.0) continue;
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            const cplx f = cplx(0.0, s / mm2) * w.coeffs[idx];
            u1[idx] = f * double(m2);
            u2[idx] = -f * double(m1);
        }
    }
}

}  // namespace

VelocityField biot_savart(const VorticityState& w) {
    validate_state(w);
    VelocityField u{w.grid, {}, {}};
    velocity_coeffs(w, u.u1, u.u2);
    return u;
}

VorticityState nonlinear(const VorticityState& w) {
    const int n = w.grid.n;
    const auto& fft = fft_for(n);
    std::vector<cplx> u1, u2;
    velocity_coeffs(w, u1, u2);
    fft.synthesis(u1);
    fft.synthesis(u2);
    // A = u*v, B = v^2 - u^2 pointwise; u.grad(w) = d1 d2 B + (d11 - d22) A.
    std::vector<cplx> a(u1.size()), b(u1.size());
    for (size_t i = 0; i < u1.size(); ++i) {
        const double uu = u1[i].real();
        const double vv = u2[i].real();
        a[i] = uu * vv;
        b[i] = vv * vv - uu * uu;
    }
    fft.analysis(a);
    fft.analysis(b);
    VorticityState out(w.grid);
    out.time = w.time;
    const double inv_s2 = 1.0 / (w.grid.scale * w.grid.scale);
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const size_t idx = static_cast<size_t>(i1) * n + i2;
            // tendency = -u.grad(w) = (m1 m2 B + (m1^2 - m2^2) A) / scale^2
            out.coeffs[idx] =
                (m1 * m2 * b[idx] + (m1 * m1 - m2 * m2) * a[idx]) * inv_s2;
        }
    }
    enforce_invariants(out);
    return out;
}

VorticityState nonlinear_direct(const VorticityState& w, int cutoff) {
    validate_state(w);
    const int n = w.grid.n;
    if (cutoff < 1) throw std::invalid_argument("nonlinear_direct: cutoff < 1");
    if (n - 2 * cutoff <= w.grid.cutoff())
        throw std::invalid_argument(
            "nonlinear_direct: cutoff too large for alias-exact comparison");
    const long cut2 = static_cast<long>(cutoff) * cutoff;

    // Collect active modes through the real sin/cos coordinates and map back
    // to complex w_k = w_{-k}/2 - i w_k/2; reject support beyond the cutoff.
    std::vector<std::array<int, 2>> modes;
    std::vector<cplx> wk;
    double leak = 0.0;
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = mode_of_index(i2, n);
            if (m1 == 0 && m2 == 0) continue;
            const long mm = static_cast<long>(m1) * m1 + static_cast<long>(m2) * m2;
            if (mm > cut2) {
                leak += std::norm(w.coeffs[static_cast<size_t>(i1) * n + i2]);
                continue;
            }
            modes.push_back({m1, m2});
        }
    }
    if (leak > 0.0)
        throw std::invalid_argument("nonlinear_direct: active mode beyond cutoff");
    for (const auto& [m1, m2] : modes) {
        const double sin_part = in_upper_half(m1, m2) ? real_coord(w, m1, m2)
                                                      : real_coord(w, -m1, -m2);
        const double cos_part = in_upper_half(m1, m2) ? real_coord(w, -m1, -m2)
                                                      : real_coord(w, m1, m2);
        if (in_upper_half(m1, m2))
            wk.push_back(cplx(0.5 * cos_part, -0.5 * sin_part));
        else
            wk.push_back(std::conj(cplx(0.5 * cos_part, -0.5 * sin_part)));
    }

    VorticityState out(w.grid);
    out.time = w.time;
    for (size_t pj = 0; pj < modes.size(); ++pj) {
        const double j1 = modes[pj][0], j2 = modes[pj][1];
        const double jj = j1 * j1 + j2 * j2;
        for (size_t pl = 0; pl < modes.size(); ++pl) {
            const double l1 = modes[pl][0], l2 = modes[pl][1];
            const int s1 = modes[pj][0] + modes[pl][0];
            const int s2 = modes[pj][1] + modes[pl][1];
            if (s1 == 0 && s2 == 0) continue;
            const double ll = l1 * l1 + l2 * l2;
            const double coef = 0.5 * (j1 * l2 - j2 * l1) * (1.0 / ll - 1.0 / jj);
            if (coef == 0.0) continue;
            out.at(s1, s2) += coef * wk[pj] * wk[pl];
        }
    }
    enforce_invariants(out);
    return out;
}

VorticityState project_low(const VorticityState& w, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("project_low: cutoff < 0");
    VorticityState out = w;
    const int n = w.grid.n;
    const long cut2 = static_cast<long>(cutoff) * cutoff;
    for (int i1 = 0; i1 < n; ++i1) {
        const long m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const long m2 = mode_of_index(i2, n);
            if (m1 * m1 + m2 * m2 > cut2)
                out.coeffs[static_cast<size_t>(i1) * n + i2] = 0.0;
        }
    }
    return out;
}

Norms norms(const VorticityState& w) {
    validate_state(w);
    const int n = w.grid.n;
    const double area = w.grid.area();
    const double inv_s2 = 1.0 / (w.grid.scale * w.grid.scale);
    double l2 = 0.0, h1 = 0.0, en = 0.0;
    for (int i1 = 0; i1 < n; ++i1) {
        const double m1 = mode_of_index(i1, n);
        for (int i2 = 0; i2 < n; ++i2) {
            const double m2 = mode_of_index(i2, n);
            const double mm = m1 * m1 + m2 * m2;
            const double p = std::norm(w.coeffs[static_cast<size_t>(i1) * n + i2]);
            l2 += p;
            h1 += mm * inv_s2 * p;
            if (mm > 0.0) en += p / (mm * inv_s2);
        }
    }
    return {std::sqrt(area * l2), std::sqrt(area * h1), 0.5 * area * en};
}

VorticityState random_state(const GridSpec& g, unsigned long long seed,
                            double decay, double amplitude) {
    g.validate();
    VorticityState w(g);
    CounterRng rng(seed, /*stream=*/0);
    const int cut = g.cutoff();
    unsigned long long idx = 0;
    for (int m1 = -cut; m1 <= cut; ++m1) {
        for (int m2 = -cut; m2 <= cut; ++m2) {
            ++idx;
            if (!in_upper_half(m1, m2)) continue;
            const double mm = double(m1) * m1 + double(m2) * m2;
            const double mag = amplitude * std::pow(1.0 + mm, -0.5 * decay);
            const auto z = rng.normal_pair(idx, 0);
            w.at(m1, m2) = 0.5 * mag * cplx(z[0], z[1]);
        }
    }
    enforce_invariants(w);
    return w;
}

double max_velocity(const VorticityState& w) {
    std::vector<cplx> u1, u2;
    velocity_coeffs(w, u1, u2);
    const auto& fft = fft_for(w.grid.n);
    fft.synthesis(u1);
    fft.synthesis(u2);
    double m = 0.0;
    for (size_t i = 0; i < u1.size(); ++i)
        m = std::max(m, std::hypot(u1[i].real(), u2[i].real()));
    return m;
}

}  // namespace vort2d
