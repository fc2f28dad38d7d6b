#include "modscat/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace modscat {

namespace {
std::mutex planner_mutex;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex);
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    int ni = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(ni, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(ni, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buf_);
}

void FftPlan::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void FftPlan::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

FftPlan& thread_plan(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlan>(n);
    return *slot;
}

} // namespace modscat
