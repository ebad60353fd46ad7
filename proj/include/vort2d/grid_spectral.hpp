#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <vector>

#include "vort2d/fft.hpp"

namespace vort2d {

/// Lattice description for fields on the torus [0, 2*pi*scale)^2.
/// Integer mode indices m live on the n x n FFT lattice; the physical
/// wavenumber is k = m / scale. The dealias cutoff is per axis: retained
/// modes satisfy |m1| <= cutoff and |m2| <= cutoff.
struct GridSpec {
    int n = 64;
    double scale = 1.0;
    double dealias_fraction = 2.0 / 3.0;

    int cutoff() const {
        return static_cast<int>(dealias_fraction * (n / 2));
    }
    double area() const {
        const double length = 2.0 * std::numbers::pi * scale;
        return length * length;
    }
    int size() const { return n * n; }
    bool operator==(const GridSpec&) const = default;

    /// Throws std::invalid_argument unless n is even and >= 8, scale > 0,
    /// and 2 <= cutoff <= n/2 - 1.
    void validate() const;
};

/// Signed mode index for a lattice row/column index i in [0, n).
inline int mode_of_index(int i, int n) { return i <= n / 2 ? i : i - n; }
/// Lattice index of a signed mode m in [-(n/2), n/2].
inline int index_of_mode(int m, int n) { return m >= 0 ? m : m + n; }

/// Spectral coefficients of a real, mean-zero scalar field on the torus.
/// Storage is the full complex lattice, row-major with coeffs[i1*n + i2]
/// holding the mode m = (mode_of_index(i1), mode_of_index(i2)); the i1 axis
/// is the x1 frequency. Invariants when valid: Hermitian symmetry
/// c(-m) = conj(c(m)), c(0) = 0, and c(m) = 0 outside the dealias square.
struct VorticityState {
    GridSpec grid;
    std::vector<cplx> coeffs;
    double time = 0.0;

    VorticityState() = default;
    explicit VorticityState(const GridSpec& g)
        : grid(g), coeffs(static_cast<size_t>(g.n) * g.n) {}

    cplx& at(int m1, int m2) {
        return coeffs[static_cast<size_t>(index_of_mode(m1, grid.n)) * grid.n +
                      index_of_mode(m2, grid.n)];
    }
    const cplx& at(int m1, int m2) const {
        return coeffs[static_cast<size_t>(index_of_mode(m1, grid.n)) * grid.n +
                      index_of_mode(m2, grid.n)];
    }
};

/// Divergence-free spectral velocity, two component lattices u1, u2.
struct VelocityField {
    GridSpec grid;
    std::vector<cplx> u1, u2;
};

struct Norms {
    double l2 = 0.0;      // ||w||_{L2}
    double h1 = 0.0;      // ||grad w||_{L2}
    double energy = 0.0;  // (1/2) ||u||^2 with u = biot_savart(w)
};

// --- lattice hygiene -------------------------------------------------------

/// Enforce c(-m) = conj(c(m)) exactly (pairwise averaging), zero the mean
/// mode and the unpaired Nyquist row/column.
void hermitianize(std::vector<cplx>& c, int n);
/// Zero every coefficient outside the dealias square.
void dealias(std::vector<cplx>& c, const GridSpec& g);
/// hermitianize + dealias + zero mean; call after any mutation.
void enforce_invariants(VorticityState& w);
/// Throws std::invalid_argument when an invariant is broken.
void validate_state(const VorticityState& w);

// --- inner products / norms ------------------------------------------------

/// Physical L2 inner product of the two real fields: area * sum Re(a conj(b)).
double inner(const VorticityState& a, const VorticityState& b);
double l2_norm_sq(const VorticityState& a);
double l2_norm(const VorticityState& a);

// --- real sin/cos coordinates ----------------------------------------------

/// True when k is in the upper half-lattice Z+ (k2 > 0, or k2 = 0 and k1 > 0).
bool in_upper_half(int k1, int k2);

/// Real coordinate of the basis function e_k (sin(k.x) for k in Z+,
/// cos(k.x) otherwise) in the expansion w = sum_k w_k e_k.
double real_coord(const VorticityState& w, int k1, int k2);
/// Add a * e_k into the state (complex lattice image of the real basis).
void add_real_coord(VorticityState& w, int k1, int k2, double a);
/// L2-normalized basis field ebar_k = e_k / ||e_k||.
VorticityState unit_basis_field(const GridSpec& g, int k1, int k2);

// --- operations -------------------------------------------------------------

/// u(m) = i*scale*(m2, -m1)/|m|^2 * w(m), zero mode excluded.
VelocityField biot_savart(const VorticityState& w);

/// Pseudo-spectral tendency -u.grad(w), dealiased; evaluated in the
/// velocity product form u.grad(w) = dxdy(v^2-u^2) + (dxx-dyy)(uv)
/// (4 transforms per call).
VorticityState nonlinear(const VorticityState& w);

/// Brute-force Galerkin convolution oracle: the quadratic part of the
/// spectral drift, (1/2) sum_{j+l=m} (j1 l2 - j2 l1)(1/|l|^2 - 1/|j|^2) w_j w_l
/// evaluated as an explicit double sum over modes with |j|,|l| <= cfg cutoff,
/// input passed through the real sin/cos coordinate map. Requires all active
/// modes of w inside |k| <= cutoff and n - 2*cutoff > grid.cutoff() so the
/// pseudo-spectral path is alias-exact on the compared range.
VorticityState nonlinear_direct(const VorticityState& w, int cutoff);

/// Orthogonal projection onto modes with Euclidean |m| <= cutoff.
VorticityState project_low(const VorticityState& w, int cutoff);

Norms norms(const VorticityState& w);

// --- misc helpers -----------------------------------------------------------

/// Random valid state, reproducible from seed; coefficient magnitudes decay
/// like (1+|m|^2)^(-decay/2).
VorticityState random_state(const GridSpec& g, unsigned long long seed,
                            double decay = 1.0, double amplitude = 1.0);

/// Max |u| over the grid (physical space), used for CFL estimates.
double max_velocity(const VorticityState& w);

}  // namespace vort2d
