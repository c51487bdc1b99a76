#pragma once

#include <array>
#include <complex>
#include <memory>

namespace seagle {

/// Smallest 5-smooth integer >= n (sizes FFTW handles at O(n log n)).
int next_fast_size(int n);

/// RAII wrapper around a complex-to-complex FFTW plan of up to rank 3.
/// Plans are created unaligned so execute() accepts any double-aligned
/// buffers; execution is reentrant and thread-safe, plan creation is
/// serialized internally.
class FftPlan {
public:
    FftPlan(int rank, const std::array<int, 3>& shape, int sign);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    /// Out-of-place transform; in and out must be distinct buffers of
    /// shape[0]*...*shape[rank-1] complex doubles. Unnormalized.
    void execute(std::complex<double>* in, std::complex<double>* out) const;

private:
    void* plan_ = nullptr;
};

}  // namespace seagle
