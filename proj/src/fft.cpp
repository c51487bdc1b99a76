#include "seagle/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "seagle/errors.hpp"

namespace seagle {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

int next_fast_size(int n) {
    if (n < 1) throw InvalidInputError("next_fast_size: n must be >= 1");
    for (int candidate = n;; ++candidate) {
        int r = candidate;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return candidate;
    }
}

FftPlan::FftPlan(int rank, const std::array<int, 3>& shape, int sign) {
    if (rank < 1 || rank > 3) throw InvalidInputError("FftPlan: rank must be 1..3");
    // Planning with FFTW_ESTIMATE leaves the buffers untouched; dummy
    // buffers only pin the shape for new-array execution later.
    std::size_t n = 1;
    for (int d = 0; d < rank; ++d) n *= static_cast<std::size_t>(shape[d]);
    std::vector<std::complex<double>> a(n), b(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft(rank, shape.data(), reinterpret_cast<fftw_complex*>(a.data()),
                          reinterpret_cast<fftw_complex*>(b.data()), sign,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw Error("FftPlan: fftw_plan_dft failed");
}

FftPlan::~FftPlan() {
    if (plan_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

FftPlan::FftPlan(FftPlan&& other) noexcept : plan_(other.plan_) { other.plan_ = nullptr; }

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
    if (this != &other) {
        if (plan_) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(static_cast<fftw_plan>(plan_));
        }
        plan_ = other.plan_;
        other.plan_ = nullptr;
    }
    return *this;
}

void FftPlan::execute(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace seagle
