#include "seagle/green.hpp"

#include <cmath>
#include <numbers>

#include "seagle/special_functions.hpp"

namespace seagle {

using std::numbers::pi;

cdouble green_scalar(const std::array<double, 3>& offset, double k_b, int dim) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += offset[d] * offset[d];
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw SingularityError("green_scalar: zero offset; use the self-cell path");
    if (dim == 2) {
        const cdouble h0 = sf::hankel1(0, k_b * r);
        return cdouble(0.0, -0.25) * h0;
    }
    if (dim == 3) {
        const double kr = k_b * r;
        return -std::polar(1.0 / (4.0 * pi * r), kr);
    }
    throw InvalidInputError("green_scalar: dim must be 2 or 3");
}

cdouble self_cell_integral(double k_b, double pixel_size, int dim) {
    if (!(k_b > 0.0) || !(pixel_size > 0.0))
        throw InvalidInputError("self_cell_integral: wavenumber and pixel size must be positive");
    const double k = k_b;
    if (dim == 2) {
        const double a = pixel_size / std::sqrt(pi);  // pi a^2 = h^2
        const double ka = k * a;
        const cdouble h1 = sf::hankel1(1, ka);
        return 1.0 / (k * k) - cdouble(0.0, 1.0) * (pi * a / (2.0 * k)) * h1;
    }
    if (dim == 3) {
        const double a = pixel_size * std::cbrt(3.0 / (4.0 * pi));  // 4/3 pi a^3 = h^3
        const double ka = k * a;
        const cdouble e = std::polar(1.0, ka);
        return (1.0 - e * (1.0 - cdouble(0.0, ka))) / (k * k);
    }
    throw InvalidInputError("self_cell_integral: dim must be 2 or 3");
}

InteriorOperator::InteriorOperator(const Grid& grid, double k_b)
    : grid_(grid),
      k_(k_b),
      fwd_(grid.dim,
           [&] {
               std::array<int, 3> p{1, 1, 1};
               for (int d = 0; d < grid.dim; ++d) p[d] = next_fast_size(2 * grid.counts[d] - 1);
               return p;
           }(),
           -1),
      inv_(grid.dim,
           [&] {
               std::array<int, 3> p{1, 1, 1};
               for (int d = 0; d < grid.dim; ++d) p[d] = next_fast_size(2 * grid.counts[d] - 1);
               return p;
           }(),
           +1) {
    if (!(k_b > 0.0)) throw InvalidInputError("InteriorOperator: wavenumber must be positive");
    for (int d = 0; d < grid_.dim; ++d) padded_[d] = next_fast_size(2 * grid_.counts[d] - 1);
    padded_total_ = 1;
    for (int d = 0; d < grid_.dim; ++d) padded_total_ *= static_cast<std::size_t>(padded_[d]);

    // Lay the lag kernel onto the padded grid: lag l at index (l + P) mod P.
    std::vector<cdouble> kernel(padded_total_, cdouble{});
    const int n0 = grid_.counts[0];
    const int n1 = grid_.dim >= 2 ? grid_.counts[1] : 1;
    const int n2 = grid_.dim == 3 ? grid_.counts[2] : 1;
    auto lag_of = [this](int t, int d, int n) -> int {
        if (t < n) return t;
        if (t > padded_[d] - n) return t - padded_[d];
        return INT32_MIN;  // dead zone between positive and negative lags
    };
    for (int t0 = 0; t0 < padded_[0]; ++t0) {
        const int l0 = lag_of(t0, 0, n0);
        if (l0 == INT32_MIN) continue;
        for (int t1 = 0; t1 < (grid_.dim >= 2 ? padded_[1] : 1); ++t1) {
            const int l1 = grid_.dim >= 2 ? lag_of(t1, 1, n1) : 0;
            if (l1 == INT32_MIN) continue;
            for (int t2 = 0; t2 < (grid_.dim == 3 ? padded_[2] : 1); ++t2) {
                const int l2 = grid_.dim == 3 ? lag_of(t2, 2, n2) : 0;
                if (l2 == INT32_MIN) continue;
                std::size_t idx =
                    (static_cast<std::size_t>(t0) * (grid_.dim >= 2 ? padded_[1] : 1) +
                     static_cast<std::size_t>(t1)) *
                        (grid_.dim == 3 ? padded_[2] : 1) +
                    static_cast<std::size_t>(t2);
                kernel[idx] = kernel_at_lag({l0, l1, l2});
            }
        }
    }
    spectrum_.assign(padded_total_, cdouble{});
    fwd_.execute(kernel.data(), spectrum_.data());
}

cdouble InteriorOperator::kernel_at_lag(const std::array<int, 3>& lag) const {
    bool zero = true;
    for (int d = 0; d < grid_.dim; ++d) zero = zero && lag[d] == 0;
    if (zero) return self_cell_integral(k_, grid_.pixel_size, grid_.dim);
    std::array<double, 3> off{0, 0, 0};
    for (int d = 0; d < grid_.dim; ++d) off[d] = lag[d] * grid_.pixel_size;
    return green_scalar(off, k_, grid_.dim) * grid_.cell_volume();
}

ComplexField InteriorOperator::apply(const ComplexField& w, bool adjoint) const {
    if (w.tag != ComplexField::Tag::grid)
        throw GeometryError("InteriorOperator::apply: expected a grid field");
    require_same_grid(w.grid, grid_, "InteriorOperator::apply");
    applies_.fetch_add(1, std::memory_order_relaxed);

    const int n0 = grid_.counts[0];
    const int n1 = grid_.dim >= 2 ? grid_.counts[1] : 1;
    const int n2 = grid_.dim == 3 ? grid_.counts[2] : 1;
    const int p1 = grid_.dim >= 2 ? padded_[1] : 1;
    const int p2 = grid_.dim == 3 ? padded_[2] : 1;

    std::vector<cdouble> a(padded_total_, cdouble{});
    std::vector<cdouble> b(padded_total_);
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2)
                a[(static_cast<std::size_t>(i0) * p1 + i1) * p2 + i2] =
                    w.values[(static_cast<std::size_t>(i0) * n1 + i1) * n2 + i2];

    fwd_.execute(a.data(), b.data());
    const double scale = 1.0 / static_cast<double>(padded_total_);
    if (adjoint) {
        for (std::size_t i = 0; i < padded_total_; ++i)
            b[i] *= std::conj(spectrum_[i]) * scale;
    } else {
        for (std::size_t i = 0; i < padded_total_; ++i) b[i] *= spectrum_[i] * scale;
    }
    inv_.execute(b.data(), a.data());

    ComplexField out = ComplexField::on_grid(grid_);
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2)
                out.values[(static_cast<std::size_t>(i0) * n1 + i1) * n2 + i2] =
                    a[(static_cast<std::size_t>(i0) * p1 + i1) * p2 + i2];
    return out;
}

ComplexField InteriorOperator::lag_kernel() const {
    std::array<int, 3> counts{1, 1, 1};
    for (int d = 0; d < grid_.dim; ++d) counts[d] = 2 * grid_.counts[d] - 1;
    std::array<double, 3> origin{0, 0, 0};
    for (int d = 0; d < grid_.dim; ++d)
        origin[d] = -(grid_.counts[d] - 1) * grid_.pixel_size;
    Grid lag_grid = Grid::make(grid_.dim, counts, grid_.pixel_size, origin);
    ComplexField out = ComplexField::on_grid(lag_grid);
    const std::size_t n = lag_grid.num_samples();
    for (std::size_t lin = 0; lin < n; ++lin) {
        std::size_t rem = lin;
        std::array<int, 3> lag{0, 0, 0};
        for (int d = lag_grid.dim - 1; d >= 0; --d) {
            lag[d] = static_cast<int>(rem % static_cast<std::size_t>(counts[d])) -
                     (grid_.counts[d] - 1);
            rem /= static_cast<std::size_t>(counts[d]);
        }
        out.values[lin] = kernel_at_lag(lag);
    }
    return out;
}

SensorOperator::SensorOperator(const Grid& grid, const SensorArray& sensors, double k_b,
                               std::size_t dense_budget)
    : grid_(grid), sensors_(sensors), k_(k_b) {
    if (!(k_b > 0.0)) throw InvalidInputError("SensorOperator: wavenumber must be positive");
    sensors_.validate_against(grid_);
    const std::size_t m = static_cast<std::size_t>(sensors_.count());
    const std::size_t n = grid_.num_samples();
    if (m * n <= dense_budget) {
        dense_.resize(m * n);
        for (std::size_t row = 0; row < m; ++row)
            for (std::size_t col = 0; col < n; ++col)
                dense_[row * n + col] = entry(static_cast<int>(row), col);
    }
}

cdouble SensorOperator::entry(int m, std::size_t n) const {
    const auto& s = sensors_.points[static_cast<std::size_t>(m)];
    const auto x = grid_.sample_coords(n);
    std::array<double, 3> off{0, 0, 0};
    for (int d = 0; d < grid_.dim; ++d) off[d] = s[d] - x[d];
    return green_scalar(off, k_, grid_.dim) * grid_.cell_volume();
}

ComplexField SensorOperator::apply(const ComplexField& w) const {
    if (w.tag != ComplexField::Tag::grid)
        throw GeometryError("SensorOperator::apply: expected a grid field");
    require_same_grid(w.grid, grid_, "SensorOperator::apply");
    applies_.fetch_add(1, std::memory_order_relaxed);
    const std::size_t m = static_cast<std::size_t>(sensors_.count());
    const std::size_t n = grid_.num_samples();
    ComplexField out = ComplexField::at_sensors(static_cast<int>(m));
    if (!dense_.empty()) {
        for (std::size_t row = 0; row < m; ++row) {
            cdouble acc{};
            const cdouble* r = &dense_[row * n];
            for (std::size_t col = 0; col < n; ++col) acc += r[col] * w.values[col];
            out.values[row] = acc;
        }
    } else {
        for (std::size_t row = 0; row < m; ++row) {
            cdouble acc{};
            for (std::size_t col = 0; col < n; ++col)
                acc += entry(static_cast<int>(row), col) * w.values[col];
            out.values[row] = acc;
        }
    }
    return out;
}

ComplexField SensorOperator::apply_adjoint(const ComplexField& e) const {
    if (e.tag != ComplexField::Tag::sensor)
        throw GeometryError("SensorOperator::apply_adjoint: expected a sensor field");
    if (e.sensor_count != sensors_.count())
        throw GeometryError("SensorOperator::apply_adjoint: sensor count mismatch");
    applies_.fetch_add(1, std::memory_order_relaxed);
    const std::size_t m = static_cast<std::size_t>(sensors_.count());
    const std::size_t n = grid_.num_samples();
    ComplexField out = ComplexField::on_grid(grid_);
    if (!dense_.empty()) {
        for (std::size_t row = 0; row < m; ++row) {
            const cdouble* r = &dense_[row * n];
            const cdouble em = e.values[row];
            for (std::size_t col = 0; col < n; ++col) out.values[col] += std::conj(r[col]) * em;
        }
    } else {
        for (std::size_t row = 0; row < m; ++row) {
            const cdouble em = e.values[row];
            for (std::size_t col = 0; col < n; ++col)
                out.values[col] += std::conj(entry(static_cast<int>(row), col)) * em;
        }
    }
    return out;
}

ComplexField direct_convolution_oracle(const Grid& grid, double k_b, const ComplexField& w) {
    if (grid.num_samples() > 4096)
        throw InvalidInputError("direct_convolution_oracle: refusing grids above 16^3 samples");
    require_same_grid(w.grid, grid, "direct_convolution_oracle");
    const cdouble self = self_cell_integral(k_b, grid.pixel_size, grid.dim);
    const double vol = grid.cell_volume();
    const std::size_t n = grid.num_samples();
    ComplexField out = ComplexField::on_grid(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = grid.sample_coords(i);
        cdouble acc{};
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                acc += self * w.values[j];
                continue;
            }
            const auto xj = grid.sample_coords(j);
            std::array<double, 3> off{0, 0, 0};
            for (int d = 0; d < grid.dim; ++d) off[d] = xi[d] - xj[d];
            acc += green_scalar(off, k_b, grid.dim) * vol * w.values[j];
        }
        out.values[i] = acc;
    }
    return out;
}

}  // namespace seagle
