#pragma once

#include <complex>
#include <cstddef>

namespace modscat {

// Unnormalized in-place complex FFT of length n on an aligned internal buffer.
// Plans come from a per-thread cache; creation is serialized because the FFTW
// planner is not reentrant. FFTW_ESTIMATE keeps plan choice (and so every
// output bit) independent of machine load.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const { return n_; }
    std::complex<double>* data() { return buf_; }
    void forward();  // sum_j e^{-2 pi i jk/n} a_j
    void backward(); // sum_k e^{+2 pi i jk/n} a_k

private:
    std::size_t n_;
    std::complex<double>* buf_;
    void* fwd_;
    void* bwd_;
};

FftPlan& thread_plan(std::size_t n);

} // namespace modscat
