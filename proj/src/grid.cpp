#include "seagle/grid.hpp"

#include <cmath>
#include <string>

namespace seagle {

Grid Grid::make(int dim, std::array<int, 3> counts, double pixel_size,
                std::array<double, 3> origin) {
    if (dim != 2 && dim != 3) throw InvalidInputError("Grid: dim must be 2 or 3");
    if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
        throw InvalidInputError("Grid: pixel_size must be positive and finite");
    for (int d = 0; d < dim; ++d) {
        if (counts[d] < 2)
            throw InvalidInputError("Grid: counts must be >= 2 along every axis");
        if (!std::isfinite(origin[d])) throw InvalidInputError("Grid: origin must be finite");
    }
    for (int d = dim; d < 3; ++d) {
        counts[d] = 1;
        origin[d] = 0.0;
    }
    Grid g;
    g.dim = dim;
    g.counts = counts;
    g.pixel_size = pixel_size;
    g.origin = origin;
    return g;
}

Grid Grid::centered(int dim, std::array<int, 3> counts, double pixel_size) {
    std::array<double, 3> origin{0, 0, 0};
    for (int d = 0; d < dim; ++d) origin[d] = -0.5 * (counts[d] - 1) * pixel_size;
    return make(dim, counts, pixel_size, origin);
}

Grid Grid::centered2d(int nx0, int nx1, double pixel_size) {
    return centered(2, {nx0, nx1, 1}, pixel_size);
}

Grid Grid::centered3d(int nx0, int nx1, int nx2, double pixel_size) {
    return centered(3, {nx0, nx1, nx2}, pixel_size);
}

std::array<double, 3> Grid::sample_coords(std::size_t linear) const {
    std::array<int, 3> idx{0, 0, 0};
    std::size_t rem = linear;
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(rem % static_cast<std::size_t>(counts[d]));
        rem /= static_cast<std::size_t>(counts[d]);
    }
    std::array<double, 3> x{0, 0, 0};
    for (int d = 0; d < dim; ++d) x[d] = coord(d, idx[d]);
    return x;
}

std::size_t Grid::linear_index(std::array<int, 3> idx) const {
    std::size_t lin = 0;
    for (int d = 0; d < dim; ++d)
        lin = lin * static_cast<std::size_t>(counts[d]) + static_cast<std::size_t>(idx[d]);
    return lin;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= pixel_size;
    return v;
}

void Grid::bounds(std::array<double, 3>& lo, std::array<double, 3>& hi) const {
    lo = {0, 0, 0};
    hi = {0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        lo[d] = origin[d] - 0.5 * pixel_size;
        hi[d] = coord(d, counts[d] - 1) + 0.5 * pixel_size;
    }
}

bool Grid::contains_point(const std::array<double, 3>& p) const {
    std::array<double, 3> lo, hi;
    bounds(lo, hi);
    for (int d = 0; d < dim; ++d)
        if (p[d] < lo[d] || p[d] > hi[d]) return false;
    return true;
}

double norm2sq(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (const cdouble& z : v) s += std::norm(z);
    return s;
}

double norm2(const std::vector<cdouble>& v) { return std::sqrt(norm2sq(v)); }

double norm2sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm2(const std::vector<double>& v) { return std::sqrt(norm2sq(v)); }

cdouble inner(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    if (a.size() != b.size()) throw InvalidInputError("inner: size mismatch");
    cdouble s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw GeometryError(std::string(where) + ": grid mismatch");
}

void require_finite(const std::vector<double>& v, const char* where) {
    for (double x : v)
        if (!std::isfinite(x))
            throw InvalidInputError(std::string(where) + ": non-finite entry");
}

}  // namespace seagle
