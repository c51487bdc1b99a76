#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "seagle/fft.hpp"
#include "seagle/geometry.hpp"
#include "seagle/grid.hpp"

namespace seagle {

/// Free-space outgoing Green function for (lap + k_b^2) g = +delta:
///   2D:  -(i/4) H_0^(1)(k_b r)
///   3D:  -exp(i k_b r) / (4 pi r)
/// with r = |x|. Note the sign: this is the negative of the more common
/// -delta convention. Throws SingularityError at r = 0; the zero-lag cell
/// is handled by the analytically integrated self term instead.
cdouble green_scalar(const std::array<double, 3>& offset, double k_b, int dim);

/// Integral of the Green function over the area/volume-equivalent disk or
/// ball of one pixel (Richmond-style self cell):
///   2D: 1/k^2 - (i pi a / 2k) H_1^(1)(k a),  pi a^2   = h^2
///   3D: (1 - exp(i k a)(1 - i k a)) / k^2,   4/3 pi a^3 = h^3
cdouble self_cell_integral(double k_b, double pixel_size, int dim);

/// Matrix-free discretization of w -> integral_Omega g(x - x') w(x') dx'
/// sampled on the grid: midpoint quadrature off the diagonal, self-cell
/// integral at zero lag, realized as a linear convolution by zero padding
/// to at least 2 n - 1 per axis.
class InteriorOperator {
public:
    InteriorOperator(const Grid& grid, double k_b);

    const Grid& grid() const { return grid_; }
    double wavenumber() const { return k_; }

    /// G w (or G^H w when adjoint). Reentrant; scratch is call-local.
    ComplexField apply(const ComplexField& w, bool adjoint = false) const;

    /// Kernel value at an integer lag vector, as used in the convolution.
    cdouble kernel_at_lag(const std::array<int, 3>& lag) const;

    /// Lag-domain kernel as a complex field on [0 .. 2n-2] per axis, for
    /// debugging and export.
    ComplexField lag_kernel() const;

    std::uint64_t apply_count() const { return applies_.load(); }
    void reset_apply_count() const { applies_.store(0); }

private:
    Grid grid_;
    double k_;
    std::array<int, 3> padded_{1, 1, 1};
    std::size_t padded_total_ = 1;
    std::vector<cdouble> spectrum_;
    FftPlan fwd_;
    FftPlan inv_;
    mutable std::atomic<std::uint64_t> applies_{0};
};

/// Propagation from the grid to M point sensors: (G~ w)_m = sum_n
/// g(x_m - x'_n) w_n h^D, with conjugate-transpose adjoint. Materialized as
/// a dense M x N matrix while M*N stays within the budget, otherwise applied
/// by on-the-fly summation.
class SensorOperator {
public:
    SensorOperator(const Grid& grid, const SensorArray& sensors, double k_b,
                   std::size_t dense_budget = 100'000'000);

    const Grid& grid() const { return grid_; }
    const SensorArray& sensors() const { return sensors_; }
    double wavenumber() const { return k_; }
    bool materialized() const { return !dense_.empty(); }

    /// G~ w for grid fields, G~^H e for sensor fields.
    ComplexField apply(const ComplexField& w) const;
    ComplexField apply_adjoint(const ComplexField& e) const;

    std::uint64_t apply_count() const { return applies_.load(); }
    void reset_apply_count() const { applies_.store(0); }

private:
    cdouble entry(int m, std::size_t n) const;

    Grid grid_;
    SensorArray sensors_;
    double k_;
    std::vector<cdouble> dense_;  // row-major M x N when materialized
    mutable std::atomic<std::uint64_t> applies_{0};
};

/// Brute-force O(N^2) reference for the interior operator, same kernel and
/// self-cell treatment. Refuses grids above 16^3 samples; oracle use only.
ComplexField direct_convolution_oracle(const Grid& grid, double k_b, const ComplexField& w);

}  // namespace seagle
