#pragma once

#include <array>
#include <vector>

#include "seagle/grid.hpp"

namespace seagle {

/// Excitation generating the incident field. Point sources radiate the free
/// space Green function; plane waves are unit-modulus exponentials.
struct SourceSpec {
    enum class Kind { point_source, plane_wave };

    Kind kind = Kind::point_source;
    std::array<double, 3> location{0, 0, 0};   // meters, point sources
    std::array<double, 3> direction{1, 0, 0};  // unit vector, plane waves
    double wavenumber = 0.0;                   // k_b, rad/m

    static SourceSpec point(std::array<double, 3> location, double k_b);
    static SourceSpec plane(std::array<double, 3> direction, double k_b);

    /// Point-source locations must lie outside the reconstruction domain.
    void validate_against(const Grid& domain) const;
};

/// M point sensors outside the reconstruction domain. Segments mark the
/// boundaries of physically distinct linear detectors; phase unwrapping for
/// the Rytov transform runs within a segment, never across.
struct SensorArray {
    std::vector<std::array<double, 3>> points;  // meters
    std::vector<int> segment_starts{0};         // ascending, first is 0

    int count() const { return static_cast<int>(points.size()); }

    void validate_against(const Grid& domain) const;

    /// [begin, end) index range of segment s.
    std::pair<int, int> segment(int s) const;
    int num_segments() const { return static_cast<int>(segment_starts.size()); }
};

double wavenumber_from_wavelength(double lambda_m);

}  // namespace seagle
