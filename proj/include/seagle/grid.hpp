#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "seagle/errors.hpp"

namespace seagle {

using cdouble = std::complex<double>;

/// Uniform Cartesian sampling of the imaging domain.
///
/// Axis 0 is the slowest-varying axis of the row-major linear layout. The
/// physical coordinate of sample i along axis d is origin[d] + i * pixel_size,
/// evaluated with that exact expression so coordinates never accumulate
/// rounding across the grid.
struct Grid {
    int dim = 2;                           // 2 or 3
    std::array<int, 3> counts{1, 1, 1};    // samples per axis; unused axes hold 1
    double pixel_size = 0.0;               // meters, isotropic
    std::array<double, 3> origin{0, 0, 0}; // meters, coordinate of sample 0

    static Grid make(int dim, std::array<int, 3> counts, double pixel_size,
                     std::array<double, 3> origin);

    /// Grid whose physical extent is centered on the coordinate origin.
    static Grid centered(int dim, std::array<int, 3> counts, double pixel_size);
    static Grid centered2d(int nx0, int nx1, double pixel_size);
    static Grid centered3d(int nx0, int nx1, int nx2, double pixel_size);

    std::size_t num_samples() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(counts[d]);
        return n;
    }

    double coord(int axis, int index) const { return origin[axis] + index * pixel_size; }

    std::array<double, 3> sample_coords(std::size_t linear) const;

    std::size_t linear_index(std::array<int, 3> idx) const;

    /// Pixel area (2D) or voxel volume (3D).
    double cell_volume() const;

    /// Half-open physical bounding box of the sampled cells, including the
    /// half-pixel margin around the outermost sample centers.
    void bounds(std::array<double, 3>& lo, std::array<double, 3>& hi) const;

    bool contains_point(const std::array<double, 3>& p) const;

    bool operator==(const Grid& other) const = default;
};

/// Real scalar per grid sample.
struct RealField {
    Grid grid;
    std::vector<double> values;

    static RealField zeros(const Grid& g) { return RealField{g, std::vector<double>(g.num_samples(), 0.0)}; }
};

/// The reconstruction unknown f = k_b^2 (1 - n^2), in 1/m^2. Stored signed:
/// f is negative wherever the refractive index exceeds the background.
struct ScatteringPotential {
    Grid grid;
    std::vector<double> values;

    static ScatteringPotential zeros(const Grid& g) {
        return ScatteringPotential{g, std::vector<double>(g.num_samples(), 0.0)};
    }
};

/// Complex scalar per sample, either on the imaging grid or at the sensors.
struct ComplexField {
    enum class Tag { grid, sensor };

    Tag tag = Tag::grid;
    Grid grid;             // meaningful when tag == grid
    int sensor_count = 0;  // meaningful when tag == sensor
    std::vector<cdouble> values;

    static ComplexField on_grid(const Grid& g) {
        ComplexField f;
        f.tag = Tag::grid;
        f.grid = g;
        f.values.assign(g.num_samples(), cdouble{});
        return f;
    }

    static ComplexField at_sensors(int m) {
        ComplexField f;
        f.tag = Tag::sensor;
        f.sensor_count = m;
        f.values.assign(static_cast<std::size_t>(m), cdouble{});
        return f;
    }

    std::size_t size() const { return values.size(); }
};

// Small dense-vector helpers shared by the solvers. All reductions run in
// index order so results are reproducible bit-for-bit.
double norm2(const std::vector<cdouble>& v);
double norm2sq(const std::vector<cdouble>& v);
double norm2(const std::vector<double>& v);
double norm2sq(const std::vector<double>& v);
cdouble inner(const std::vector<cdouble>& a, const std::vector<cdouble>& b);

void require_same_grid(const Grid& a, const Grid& b, const char* where);
void require_finite(const std::vector<double>& v, const char* where);

}  // namespace seagle
