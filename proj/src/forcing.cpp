#include "vort2d/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vort2d {

ForcingSpec validate_forcing(std::vector<ForcingMode> raw, bool auto_reflect) {
    if (raw.empty()) throw std::invalid_argument("forcing: empty mode list");

    if (auto_reflect) {
        std::set<std::pair<int, int>> have;
        for (const auto& m : raw) have.insert({m.k1, m.k2});
        const auto base = raw;
        for (const auto& m : base)
            if (!have.count({-m.k1, -m.k2})) {
                raw.push_back({-m.k1, -m.k2, m.gamma});
                have.insert({-m.k1, -m.k2});
            }
    }

    std::set<std::pair<int, int>> seen;
    for (const auto& m : raw) {
        if (m.k1 == 0 && m.k2 == 0)
            throw std::invalid_argument("forcing: zero wavenumber forced");
        if (!(m.gamma > 0.0))
            throw std::invalid_argument("forcing: nonpositive amplitude");
        if (!seen.insert({m.k1, m.k2}).second) {
            std::ostringstream os;
            os << "forcing: duplicate mode (" << m.k1 << "," << m.k2 << ")";
            throw std::invalid_argument(os.str());
        }
    }
    for (const auto& m : raw) {
        const auto partner =
            std::find_if(raw.begin(), raw.end(), [&](const ForcingMode& p) {
                return p.k1 == -m.k1 && p.k2 == -m.k2;
            });
        if (partner == raw.end()) {
            std::ostringstream os;
            os << "forcing: missing reflection partner of (" << m.k1 << ","
               << m.k2 << ")";
            throw std::invalid_argument(os.str());
        }
        if (partner->gamma != m.gamma)
            throw std::invalid_argument("forcing: reflected amplitudes differ");
    }

    ForcingSpec spec;
    spec.modes = std::move(raw);
    const double two_pi2 = 2.0 * std::numbers::pi * std::numbers::pi;
    double sum_g2 = 0.0, sum_g2_over_k2 = 0.0, sum_g2_k2 = 0.0;
    for (const auto& m : spec.modes) {
        const double kk = double(m.k1) * m.k1 + double(m.k2) * m.k2;
        sum_g2 += m.gamma * m.gamma;
        sum_g2_over_k2 += m.gamma * m.gamma / kk;
        sum_g2_k2 += m.gamma * m.gamma * kk;
        spec.kappa_f = std::max(spec.kappa_f, std::sqrt(kk));
    }
    spec.eps = two_pi2 * sum_g2;
    spec.eps_prime = two_pi2 * sum_g2_over_k2;
    spec.kappa_f_rms = std::sqrt(sum_g2_k2 / sum_g2);
    return spec;
}

namespace {

long long mul_sub_checked(long long a, long long q, long long b) {
    long long prod, res;
    if (__builtin_mul_overflow(q, b, &prod) ||
        __builtin_sub_overflow(a, prod, &res))
        throw std::overflow_error("lattice normal form: 64-bit overflow");
    return res;
}

// Column-style integer normal form of a 2 x m matrix: Euclidean reduction
// across columns until at most two nonzero columns remain, lower triangular.
std::array<std::array<long long, 2>, 2> lattice_normal_form(
    std::vector<std::array<long long, 2>> cols) {
    // Reduce row 0: gcd all leading entries into one column.
    auto reduce_row = [&cols](size_t row, size_t from) {
        size_t pivot = from;
        while (true) {
            // Find column with smallest nonzero |entry| in this row.
            size_t best = cols.size();
            for (size_t j = from; j < cols.size(); ++j)
                if (cols[j][row] != 0 &&
                    (best == cols.size() ||
                     std::abs(cols[j][row]) < std::abs(cols[best][row])))
                    best = j;
            if (best == cols.size()) return cols.size();  // all zero
            std::swap(cols[from], cols[best]);
            bool changed = false;
            for (size_t j = from + 1; j < cols.size(); ++j) {
                if (cols[j][row] == 0) continue;
                const long long q = cols[j][row] / cols[from][row];
                cols[j][0] = mul_sub_checked(cols[j][0], q, cols[from][0]);
                cols[j][1] = mul_sub_checked(cols[j][1], q, cols[from][1]);
                if (cols[j][row] != 0) changed = true;
            }
            if (!changed) break;
        }
        pivot = from;
        if (cols[pivot][row] < 0) {
            cols[pivot][0] = -cols[pivot][0];
            cols[pivot][1] = -cols[pivot][1];
        }
        return pivot;
    };

    std::array<std::array<long long, 2>, 2> nf{{{0, 0}, {0, 0}}};
    const size_t p0 = reduce_row(0, 0);
    if (p0 == cols.size()) {
        // First row identically zero: reduce second row only.
        const size_t p1 = reduce_row(1, 0);
        if (p1 != cols.size()) nf[1] = {0, cols[p1][1]};
        return nf;
    }
    nf[0] = {cols[p0][0], cols[p0][1]};
    const size_t p1 = reduce_row(1, p0 + 1);
    if (p1 != cols.size()) {
        // Normalize the below-diagonal entry into [0, d2).
        long long d2 = cols[p1][1];
        long long x = nf[0][1];
        if (d2 != 0) {
            x %= d2;
            if (x < 0) x += d2;
        }
        nf[0][1] = x;
        nf[1] = {0, d2};
    }
    // Store column-major as rows of the triangular form [[d1,0],[x,d2]].
    return {{{nf[0][0], 0}, {nf[0][1], nf[1][1]}}};
}

}  // namespace

HormanderReport hormander_check(const std::vector<std::array<int, 2>>& K) {
    if (K.empty()) throw std::invalid_argument("hormander_check: empty K");
    HormanderReport rep;

    std::set<std::pair<int, int>> set;
    for (const auto& k : K) set.insert({k[0], k[1]});
    rep.cond_a = true;
    for (const auto& k : K)
        if (!set.count({-k[0], -k[1]})) {
            rep.cond_a = false;
            rep.missing_reflections.push_back({k[0], k[1]});
        }

    for (size_t i = 0; i < K.size() && !rep.cond_b; ++i)
        for (size_t j = i + 1; j < K.size(); ++j) {
            const long li = long(K[i][0]) * K[i][0] + long(K[i][1]) * K[i][1];
            const long lj = long(K[j][0]) * K[j][0] + long(K[j][1]) * K[j][1];
            if (li != lj) {
                rep.cond_b = true;
                rep.unequal_pair = {{{K[i][0], K[i][1]}, {K[j][0], K[j][1]}}};
                break;
            }
        }

    std::vector<std::array<long long, 2>> cols;
    for (const auto& k : K) cols.push_back({k[0], k[1]});
    rep.normal_form = lattice_normal_form(std::move(cols));
    // K spans Z^2 iff the triangular form is the identity up to units.
    rep.cond_c = std::llabs(rep.normal_form[0][0]) == 1 &&
                 std::llabs(rep.normal_form[1][1]) == 1;
    return rep;
}

HormanderReport hormander_check(const ForcingSpec& spec) {
    std::vector<std::array<int, 2>> K;
    for (const auto& m : spec.modes) K.push_back({m.k1, m.k2});
    return hormander_check(K);
}

std::string HormanderReport::describe() const {
    std::ostringstream os;
    os << "(a) reflection symmetry: " << (cond_a ? "pass" : "FAIL");
    if (!cond_a && !missing_reflections.empty())
        os << " [missing partner of (" << missing_reflections[0][0] << ","
           << missing_reflections[0][1] << ")]";
    os << "\n(b) unequal lengths:     " << (cond_b ? "pass" : "FAIL");
    if (cond_b && unequal_pair)
        os << " [(" << (*unequal_pair)[0][0] << "," << (*unequal_pair)[0][1]
           << ") vs (" << (*unequal_pair)[1][0] << "," << (*unequal_pair)[1][1]
           << ")]";
    os << "\n(c) spans Z^2:           " << (cond_c ? "pass" : "FAIL")
       << " [normal form diag " << normal_form[0][0] << ", "
       << normal_form[1][1] << "]";
    os << "\noverall: " << (pass() ? "PASS" : "FAIL");
    return os.str();
}

VorticityState sample_increment(const ForcingSpec& spec, const GridSpec& grid,
                                double dt, const CounterRng& rng,
                                std::uint64_t step_index) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt <= 0");
    VorticityState incr(grid);
    const double sdt = std::sqrt(dt);
    for (size_t j = 0; j < spec.modes.size(); ++j) {
        const auto& m = spec.modes[j];
        const double db = sdt * rng.normal(step_index, j);
        add_real_coord(incr, m.k1, m.k2, m.gamma * db);
    }
    hermitianize(incr.coeffs, grid.n);
    return incr;
}

}  // namespace vort2d
