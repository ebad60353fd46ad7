#include "vort2d/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace vort2d {

namespace {
std::mutex planner_mutex;
}

Fft2D::Fft2D(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("Fft2D: n must be >= 2");
    std::vector<cplx> probe(static_cast<size_t>(n) * n);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    std::lock_guard<std::mutex> lock(planner_mutex);
    // FFTW_UNALIGNED lets the plans run on any caller buffer.
    plan_fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fftw plan failed");
}

void Fft2D::synthesis(std::vector<cplx>& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
}

void Fft2D::analysis(std::vector<cplx>& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
    const double inv = 1.0 / (static_cast<double>(n_) * n_);
    for (auto& v : a) v *= inv;
}

const Fft2D& fft_for(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::unique_ptr<Fft2D>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft2D>(n);
    return *slot;
}

}  // namespace vort2d
