#pragma once

#include <complex>
#include <vector>

namespace vort2d {

using cplx = std::complex<double>;

/// Cached FFTW plans for one 2D lattice size. Plans are created once per
/// size (planner access is serialized; execution is thread-safe) and shared
/// process-wide, so concurrent trajectories can transform without
/// coordination. All plans use FFTW_ESTIMATE for reproducible results.
class Fft2D {
  public:
    explicit Fft2D(int n);

    int n() const { return n_; }
    int size() const { return n_ * n_; }

    /// In-place synthesis: coefficients -> grid values (unnormalized
    /// exponential sum with e^{+i m.x}).
    void synthesis(std::vector<cplx>& a) const;

    /// In-place analysis: grid values -> coefficients (forward sum divided
    /// by n^2, the exact inverse of synthesis).
    void analysis(std::vector<cplx>& a) const;

  private:
    int n_;
    void* plan_fwd_;  // fftw_plan, opaque here to keep fftw3.h out of headers
    void* plan_bwd_;
};

/// Process-wide plan cache; returns a shared instance for lattice size n.
const Fft2D& fft_for(int n);

}  // namespace vort2d
