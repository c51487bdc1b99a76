#include "seagle/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seagle {

ScatteringPotential potential_from_index(const RealField& index, double k_b) {
    if (!(k_b > 0.0) || !std::isfinite(k_b))
        throw InvalidInputError("potential_from_index: wavenumber must be positive");
    ScatteringPotential f;
    f.grid = index.grid;
    f.values.resize(index.values.size());
    const double k2 = k_b * k_b;
    for (std::size_t i = 0; i < index.values.size(); ++i) {
        double n = index.values[i];
        if (!std::isfinite(n) || n <= 0.0)
            throw InvalidInputError("potential_from_index: index entries must be finite and positive");
        f.values[i] = k2 * (1.0 - n * n);
    }
    return f;
}

RealField index_from_potential(const ScatteringPotential& f, double k_b) {
    if (!(k_b > 0.0)) throw InvalidInputError("index_from_potential: wavenumber must be positive");
    RealField n;
    n.grid = f.grid;
    n.values.resize(f.values.size());
    const double inv_k2 = 1.0 / (k_b * k_b);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double arg = 1.0 - f.values[i] * inv_k2;
        if (arg < 0.0) throw InvalidInputError("index_from_potential: potential implies imaginary index");
        n.values[i] = std::sqrt(arg);
    }
    return n;
}

double contrast(const ScatteringPotential& f, double k_b) {
    if (!(k_b > 0.0)) throw InvalidInputError("contrast: wavenumber must be positive");
    if (f.values.empty()) throw InvalidInputError("contrast: empty grid");
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    return peak / (k_b * k_b);
}

namespace {

struct Ellipse {
    double cx, cy;  // center, unit phantom coordinates
    double a, b;    // semi axes
    double phi_deg;
    double value;
};

// Modified (Toft) Shepp-Logan intensity table on [-1, 1]^2.
constexpr Ellipse kSheppLogan[] = {
    {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
    {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
    {0.22, 0.0, 0.11, 0.31, -18.0, -0.2},
    {-0.22, 0.0, 0.16, 0.41, 18.0, -0.2},
    {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
    {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
    {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
    {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
    {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},
    {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
};

double shepp_logan_value(double x, double y) {
    double v = 0.0;
    for (const Ellipse& e : kSheppLogan) {
        double phi = e.phi_deg * std::numbers::pi / 180.0;
        double c = std::cos(phi), s = std::sin(phi);
        double dx = x - e.cx, dy = y - e.cy;
        double xr = dx * c + dy * s;
        double yr = -dx * s + dy * c;
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.value;
    }
    return v;
}

}  // namespace

ScatteringPotential make_shepp_logan(const Grid& grid, double target_contrast, double k_b,
                                     PotentialSign sign, double extent_fraction) {
    if (grid.dim != 2) throw InvalidInputError("make_shepp_logan: only 2D grids are supported");
    if (target_contrast < 0.0) throw InvalidInputError("make_shepp_logan: contrast must be >= 0");
    ScatteringPotential f = ScatteringPotential::zeros(grid);
    if (target_contrast == 0.0) return f;

    // Map grid coordinates into phantom coordinates so the outer ellipse
    // (semi axis 0.92) spans extent_fraction of the shorter grid extent.
    double ext0 = (grid.counts[0] - 1) * grid.pixel_size;
    double ext1 = (grid.counts[1] - 1) * grid.pixel_size;
    double half = 0.5 * std::min(ext0, ext1);
    double unit = extent_fraction * half / 0.92;
    double c0 = grid.origin[0] + 0.5 * ext0;
    double c1 = grid.origin[1] + 0.5 * ext1;

    double peak = 0.0;
    for (int i0 = 0; i0 < grid.counts[0]; ++i0) {
        for (int i1 = 0; i1 < grid.counts[1]; ++i1) {
            double y = (grid.coord(0, i0) - c0) / unit;
            double x = (grid.coord(1, i1) - c1) / unit;
            double v = shepp_logan_value(x, y);
            f.values[grid.linear_index({i0, i1, 0})] = v;
            peak = std::max(peak, std::abs(v));
        }
    }
    if (peak == 0.0) return ScatteringPotential::zeros(grid);

    double scale = target_contrast * k_b * k_b / peak;
    if (sign == PotentialSign::negative) scale = -scale;
    for (double& v : f.values) v *= scale;
    return f;
}

ScatteringPotential make_ball(const Grid& grid, std::array<double, 3> center, double radius,
                              double target_contrast, double k_b, PotentialSign sign,
                              int supersample) {
    if (!(radius > 0.0)) throw InvalidInputError("make_ball: radius must be positive");
    if (target_contrast < 0.0) throw InvalidInputError("make_ball: contrast must be >= 0");
    ScatteringPotential f = ScatteringPotential::zeros(grid);
    double amp = target_contrast * k_b * k_b;
    if (sign == PotentialSign::negative) amp = -amp;
    const double h = grid.pixel_size;
    const double r2 = radius * radius;
    const int ss = std::max(1, supersample);
    const double sub = h / ss;
    const std::size_t n = grid.num_samples();
    for (std::size_t lin = 0; lin < n; ++lin) {
        auto x = grid.sample_coords(lin);
        double dist = 0.0;
        for (int d = 0; d < grid.dim; ++d) {
            double dd = x[d] - center[d];
            dist += dd * dd;
        }
        double margin = 0.9 * h;  // > half cell diagonal in 2D and 3D
        double rr = std::sqrt(dist);
        if (rr < radius - margin) {
            f.values[lin] = amp;
            continue;
        }
        if (rr > radius + margin) continue;
        // Boundary cell: supersampled coverage fraction.
        long hits = 0, total = 1;
        for (int d = 0; d < grid.dim; ++d) total *= ss;
        for (long s = 0; s < total; ++s) {
            long rem = s;
            double q2 = 0.0;
            for (int d = grid.dim - 1; d >= 0; --d) {
                int sd = static_cast<int>(rem % ss);
                rem /= ss;
                double xd = x[d] - 0.5 * h + (sd + 0.5) * sub - center[d];
                q2 += xd * xd;
            }
            if (q2 <= r2) ++hits;
        }
        f.values[lin] = amp * static_cast<double>(hits) / static_cast<double>(total);
    }
    return f;
}

}  // namespace seagle
